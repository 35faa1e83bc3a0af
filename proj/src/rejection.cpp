#include "radvel/rejection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "radvel/kernels.hpp"
#include "radvel/optimizer.hpp"

namespace radvel {

std::string_view to_string(RejectorMethod method) noexcept {
  switch (method) {
    case RejectorMethod::Ransac: return "ransac";
    case RejectorMethod::Mlesac: return "mlesac";
    case RejectorMethod::Gnc: return "gnc";
    case RejectorMethod::None: return "none";
  }
  return "none";
}

void validate(const RejectorConfig& cfg) {
  const auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
  if (!(cfg.inlier_threshold > 0.0)) fail("rejector inlier_threshold must be positive");
  if (cfg.max_iterations < 1) fail("rejector max_iterations must be at least 1");
  if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0)) fail("rejector confidence must be in (0,1)");
  if (!(cfg.mlesac_sigma > 0.0)) fail("mlesac_sigma must be positive");
  if (!(cfg.mlesac_outlier_span > 0.0)) fail("mlesac_outlier_span must be positive");
  if (cfg.mlesac_em_steps < 1) fail("mlesac_em_steps must be at least 1");
  if (!(cfg.gnc_mu_init > 1.0)) fail("gnc_mu_init must exceed 1");
  if (!(cfg.gnc_mu_divisor > 1.0)) fail("gnc_mu_divisor must exceed 1");
  if (cfg.gnc_max_outer < 1) fail("gnc_max_outer must be at least 1");
  if (!(cfg.min_coplanarity > 0.0)) fail("min_coplanarity must be positive");
}

std::size_t InlierReport::inlier_count() const noexcept {
  return static_cast<std::size_t>(std::count(inlier_mask.begin(), inlier_mask.end(), 1));
}

int adaptive_iterations(double inlier_ratio, double confidence, int cap) noexcept {
  if (inlier_ratio >= 1.0) return 1;
  const double all_in = inlier_ratio * inlier_ratio * inlier_ratio;
  if (all_in <= std::numeric_limits<double>::epsilon()) return cap;
  const double needed = std::ceil(std::log(1.0 - confidence) / std::log1p(-all_in));
  if (!(needed < static_cast<double>(cap))) return cap;
  return std::max(1, static_cast<int>(needed));
}

namespace {

std::optional<Vec3> solve_minimal(const Mat3& directions, const Vec3& doppler,
                                  double min_coplanarity) {
  if (!(std::fabs(directions.determinant()) >= min_coplanarity)) return std::nullopt;
  return directions.partialPivLu().solve(-doppler);
}

void require_minimum(const RadarScan& scan) {
  if (scan.size() < 3) {
    throw Error(Errc::NotEnoughDetections,
                "need at least 3 detections, have " + std::to_string(scan.size()));
  }
}

// Draws three distinct indices uniformly from [0, n).
struct TripleSampler {
  std::mt19937_64 rng;
  std::size_t n;

  std::array<std::size_t, 3> draw() {
    std::uniform_int_distribution<std::size_t> first(0, n - 1), second(0, n - 2), third(0, n - 3);
    const std::size_t i = first(rng);
    std::size_t j = second(rng);
    if (j >= i) ++j;
    std::size_t k = third(rng);
    const std::size_t lo = std::min(i, j), hi = std::max(i, j);
    if (k >= lo) ++k;
    if (k >= hi) ++k;
    return {i, j, k};
  }
};

// Hypothesis used when no sample is well conditioned: the minimum-norm
// solution, accepted only if it explains every detection.
std::optional<Vec3> consistent_degenerate_fit(const kernels::DirectionBlock& block,
                                              double threshold) {
  const auto n = static_cast<Eigen::Index>(block.size());
  Eigen::MatrixX3d a(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    a.row(i) << block.ux[k], block.uy[k], block.uz[k];
    rhs(i) = -block.doppler[k];
  }
  const Vec3 v = a.completeOrthogonalDecomposition().solve(rhs);
  InlierMask mask(block.size());
  if (kernels::gate_inliers(block.view(), v, threshold, mask) != block.size()) return std::nullopt;
  return v;
}

template <typename Score>
InlierReport sample_consensus(const RadarScan& scan, const RejectorConfig& cfg, Score&& score) {
  validate(cfg);
  require_minimum(scan);
  const kernels::DirectionBlock block(scan);
  const std::size_t n = block.size();

  TripleSampler sampler{std::mt19937_64(cfg.seed), n};
  InlierReport best;
  bool have_best = false;
  int limit = cfg.max_iterations;
  int iter = 0;
  for (; iter < limit; ++iter) {
    const auto idx = sampler.draw();
    Mat3 dirs;
    Vec3 dop;
    for (int r = 0; r < 3; ++r) {
      const std::size_t k = idx[static_cast<std::size_t>(r)];
      dirs.row(r) << block.ux[k], block.uy[k], block.uz[k];
      dop(r) = block.doppler[k];
    }
    const auto hypothesis = solve_minimal(dirs, dop, cfg.min_coplanarity);
    if (!hypothesis) continue;

    InlierReport candidate = score(block, *hypothesis);
    // Ties keep the earliest hypothesis.
    if (!have_best || candidate.score > best.score) {
      best = std::move(candidate);
      have_best = true;
      const double ratio = static_cast<double>(best.inlier_count()) / static_cast<double>(n);
      limit = std::min(limit, adaptive_iterations(ratio, cfg.confidence, cfg.max_iterations));
    }
  }

  if (!have_best) {
    const auto fallback = consistent_degenerate_fit(block, cfg.inlier_threshold);
    if (!fallback) {
      throw Error(Errc::NoValidHypothesis,
                  "all " + std::to_string(iter) + " samples were degenerate");
    }
    best = score(block, *fallback);
    best.inlier_mask.assign(n, 1);
  }
  best.iterations_used = iter;
  return best;
}

struct MlesacFit {
  double nll;
  InlierMask mask;
};

MlesacFit mlesac_fit(const kernels::DirectionBlock& block, const Vec3& v,
                     const RejectorConfig& cfg) {
  const std::size_t n = block.size();
  std::vector<double> r(n);
  kernels::residuals(block.view(), v, r);

  const double sigma = cfg.mlesac_sigma;
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  const double outlier_density = 1.0 / cfg.mlesac_outlier_span;
  std::vector<double> inlier_density(n);
  for (std::size_t i = 0; i < n; ++i) {
    inlier_density[i] = norm * std::exp(-0.5 * (r[i] / sigma) * (r[i] / sigma));
  }

  constexpr double kMixFloor = 1e-9;
  double gamma = 0.5;
  std::vector<double> posterior(n);
  const auto e_step = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      const double in = gamma * inlier_density[i];
      posterior[i] = in / (in + (1.0 - gamma) * outlier_density);
    }
  };
  for (int step = 0; step < cfg.mlesac_em_steps; ++step) {
    e_step();
    gamma = std::clamp(kernels::sum(posterior) / static_cast<double>(n), kMixFloor, 1.0 - kMixFloor);
  }
  e_step();

  MlesacFit fit{0.0, InlierMask(n)};
  for (std::size_t i = 0; i < n; ++i) {
    fit.nll -= std::log(gamma * inlier_density[i] + (1.0 - gamma) * outlier_density);
    fit.mask[i] = posterior[i] > 0.5 ? 1 : 0;
  }
  return fit;
}

// Surrogate of the truncated quadratic at GNC parameter mu (convex for large
// mu, the truncated quadratic itself as mu -> 0).
double gnc_tls_surrogate(double r, double bound, double mu) {
  const double r2 = r * r, c2 = bound * bound;
  if (r2 <= c2 / (1.0 + mu)) return r2;
  if (r2 >= (1.0 + mu) * c2) return c2;
  return (2.0 * bound * std::fabs(r) * std::sqrt(1.0 + mu) - (c2 + r2)) / mu;
}

double gnc_tls_weight(double r, double bound, double mu) {
  const double r2 = r * r, c2 = bound * bound;
  if (r2 <= c2 / (1.0 + mu)) return 1.0;
  if (r2 >= (1.0 + mu) * c2) return 0.0;
  return (bound / std::fabs(r) * std::sqrt(1.0 + mu) - 1.0) / mu;
}

}  // namespace

Vec3 solve_three_point(const Detection& d1, const Detection& d2, const Detection& d3,
                       double min_coplanarity) {
  Mat3 dirs;
  dirs.row(0) = direction_of(d1).vec().transpose();
  dirs.row(1) = direction_of(d2).vec().transpose();
  dirs.row(2) = direction_of(d3).vec().transpose();
  const auto v = solve_minimal(dirs, Vec3(d1.doppler, d2.doppler, d3.doppler), min_coplanarity);
  if (!v) {
    throw Error(Errc::DegenerateSample, "direction determinant " +
                                            std::to_string(dirs.determinant()) + " below " +
                                            std::to_string(min_coplanarity));
  }
  return *v;
}

InlierReport run_ransac(const RadarScan& scan, const RejectorConfig& cfg) {
  return sample_consensus(scan, cfg, [&](const kernels::DirectionBlock& block, const Vec3& v) {
    InlierReport report;
    report.inlier_mask.resize(block.size());
    report.score = static_cast<double>(
        kernels::gate_inliers(block.view(), v, cfg.inlier_threshold, report.inlier_mask));
    report.hypothesis = v;
    return report;
  });
}

InlierReport run_mlesac(const RadarScan& scan, const RejectorConfig& cfg) {
  // sample_consensus maximizes the score, so carry the negated likelihood
  // internally and flip it back for the report.
  InlierReport best =
      sample_consensus(scan, cfg, [&](const kernels::DirectionBlock& block, const Vec3& v) {
        MlesacFit fit = mlesac_fit(block, v, cfg);
        InlierReport report;
        report.inlier_mask = std::move(fit.mask);
        report.score = -fit.nll;
        report.hypothesis = v;
        return report;
      });
  best.score = -best.score;
  return best;
}

double mlesac_score(const RadarScan& scan, const Vec3& hypothesis, const RejectorConfig& cfg) {
  return mlesac_fit(kernels::DirectionBlock(scan), hypothesis, cfg).nll;
}

InlierReport run_gnc(const RadarScan& scan, const RejectorConfig& cfg, const Vec3& initial) {
  validate(cfg);
  require_minimum(scan);
  if (!all_finite(initial)) throw Error(Errc::NonFinite, "GNC initial point is not finite");

  const kernels::DirectionBlock block(scan);
  const std::size_t n = block.size();
  const double bound = cfg.inlier_threshold;
  std::vector<double> r(n), w(n, 1.0);

  InlierReport report;
  report.above_recommended_size = n > kGncRecommendedMaxSize;
  report.converged = false;

  Vec3 v = initial;
  kernels::residuals(block.view(), v, r);
  double max_r2 = 0.0;
  for (double x : r) max_r2 = std::max(max_r2, x * x);
  double mu = std::min(cfg.gnc_mu_init, 2.0 * max_r2 / (bound * bound) - 1.0);
  mu = std::max(mu, 1.0);

  int round = 0;
  while (round < cfg.gnc_max_outer) {
    ++round;
    for (std::size_t i = 0; i < n; ++i) w[i] = gnc_tls_weight(r[i], bound, mu);
    try {
      v = weighted_least_squares(block.view(), w);
    } catch (const Error& e) {
      if (e.code() != Errc::RankDeficient && e.code() != Errc::NotEnoughDetections) throw;
      break;  // too few surviving weights; keep the last determined solution
    }
    kernels::residuals(block.view(), v, r);
    if (mu <= 1.0) {
      report.converged = true;
      break;
    }
    mu = std::max(1.0, mu / cfg.gnc_mu_divisor);
  }

  report.hypothesis = v;
  report.iterations_used = round;
  report.inlier_mask.resize(n);
  double cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    report.inlier_mask[i] = gnc_tls_weight(r[i], bound, mu) > 0.5 ? 1 : 0;
    cost += gnc_tls_surrogate(r[i], bound, mu);
  }
  report.score = cost;
  return report;
}

InlierReport run_passthrough(const RadarScan& scan, const Vec3& hypothesis) {
  InlierReport report;
  report.inlier_mask.assign(scan.size(), 1);
  report.hypothesis = hypothesis;
  return report;
}

}  // namespace radvel
