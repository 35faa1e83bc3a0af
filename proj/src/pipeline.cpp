#include "radvel/pipeline.hpp"

#include <cmath>
#include <limits>

namespace radvel {

void validate(const EstimatorConfig& cfg) {
  validate(cfg.rejector);
  validate(cfg.loss);
  validate(cfg.solver);
  validate(cfg.zero_velocity);
  validate(cfg.filter);
}

VelocityEstimator::VelocityEstimator(EstimatorConfig cfg) : cfg_(std::move(cfg)) { validate(cfg_); }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

VelocityEstimate degenerate(const RadarScan& scan) {
  VelocityEstimate e;
  e.timestamp = scan.timestamp;
  e.velocity = Vec3::Constant(kNaN);
  e.status = EstimateStatus::Degenerate;
  e.total_count = static_cast<int>(scan.size());
  e.residual_rms = kNaN;
  return e;
}

}  // namespace

VelocityEstimate VelocityEstimator::process_scan(const RadarScan& scan) {
  diag_ = {};

  if (detect_zero_velocity(scan, cfg_.zero_velocity)) {
    VelocityEstimate e;
    e.timestamp = scan.timestamp;
    e.status = EstimateStatus::ZeroVelocity;
    e.total_count = static_cast<int>(scan.size());
    double sq = 0.0;
    for (const auto& d : scan.detections) {
      if (std::fabs(d.doppler) < cfg_.zero_velocity.doppler_threshold) ++e.inlier_count;
      sq += d.doppler * d.doppler;
    }
    e.residual_rms = std::sqrt(sq / static_cast<double>(scan.size()));
    if (cfg_.filter_enabled) diag_.gate = filter_step(filter_, cfg_.filter, e);
    last_accepted_ = Vec3::Zero();
    return e;
  }

  VelocityEstimate e;
  try {
    e = estimate_motion(scan);
  } catch (const Error& err) {
    diag_.failure = err.what();
    if (err.code() == Errc::NonFinite) {
      VelocityEstimate rejected = degenerate(scan);
      rejected.status = EstimateStatus::Rejected;
      return rejected;
    }
    return degenerate(scan);
  }
  gate(e);
  return e;
}

VelocityEstimate VelocityEstimator::estimate_motion(const RadarScan& scan) {
  if (scan.size() < kMinDetectionsForEstimate) {
    throw Error(Errc::NotEnoughDetections,
                "scan has " + std::to_string(scan.size()) + " detections");
  }
  validate(scan);

  const InlierMask all(scan.size(), 1);
  const auto plain_ls = [&] { return solve_linear_ls(scan, all).velocity; };

  InlierReport report;
  std::optional<Vec3> seed;
  switch (cfg_.rejector.method) {
    case RejectorMethod::Ransac:
      report = run_ransac(scan, cfg_.rejector);
      seed = report.hypothesis;
      break;
    case RejectorMethod::Mlesac:
      report = run_mlesac(scan, cfg_.rejector);
      seed = report.hypothesis;
      break;
    case RejectorMethod::Gnc: {
      const Vec3 start = last_accepted_ ? *last_accepted_ : plain_ls();
      report = run_gnc(scan, cfg_.rejector, start);
      if (report.above_recommended_size) {
        diag_.warnings.push_back("GNC run on " + std::to_string(scan.size()) +
                                 " detections, above the recommended " +
                                 std::to_string(kGncRecommendedMaxSize));
      }
      if (!report.converged) diag_.warnings.push_back("GNC did not reach its final round");
      seed = report.hypothesis;
      break;
    }
    case RejectorMethod::None:
      report = run_passthrough(scan, Vec3::Zero());
      break;
  }

  SolveResult solve;
  if (cfg_.loss.kind == LossKind::L2) {
    solve = solve_linear_ls(scan, report.inlier_mask, scan_weights(scan, cfg_.loss));
  } else {
    if (!seed) seed = last_accepted_ ? *last_accepted_ : plain_ls();
    solve = solve_robust(scan, report.inlier_mask, cfg_.loss, cfg_.solver, *seed);
  }
  if (!all_finite(solve.velocity)) throw Error(Errc::NonFinite, "solver returned non-finite velocity");

  VelocityEstimate e;
  e.timestamp = scan.timestamp;
  e.velocity = solve.velocity;
  e.status = EstimateStatus::Estimated;
  e.inlier_count = static_cast<int>(report.inlier_count());
  e.total_count = static_cast<int>(scan.size());
  e.residual_rms = solve.residual_rms;
  return e;
}

void VelocityEstimator::gate(VelocityEstimate& e) {
  if (cfg_.filter_enabled) {
    diag_.gate = filter_step(filter_, cfg_.filter, e);
    if (diag_.gate->decision == GateDecision::Reject) {
      e.status = EstimateStatus::Rejected;
      return;
    }
  }
  last_accepted_ = e.velocity;
}

VelocityEstimate process_scan(VelocityEstimator& estimator, const RadarScan& scan) {
  return estimator.process_scan(scan);
}

std::vector<VelocityEstimate> process_sequence(const EstimatorConfig& cfg,
                                               std::span<const RadarScan> scans) {
  VelocityEstimator estimator(cfg);
  std::vector<VelocityEstimate> out;
  out.reserve(scans.size());
  for (const auto& scan : scans) out.push_back(estimator.process_scan(scan));
  return out;
}

}  // namespace radvel
