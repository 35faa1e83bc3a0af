#include "radvel/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace radvel {

void validate(const SolverConfig& cfg) {
  if (!(cfg.wolfe_c1 > 0.0 && cfg.wolfe_c1 < cfg.wolfe_c2 && cfg.wolfe_c2 < 1.0)) {
    throw Error(Errc::InvalidConfig, "Wolfe constants must satisfy 0 < c1 < c2 < 1");
  }
  if (!(cfg.grad_tolerance > 0.0) || !(cfg.step_tolerance > 0.0)) {
    throw Error(Errc::InvalidConfig, "solver tolerances must be positive");
  }
  if (cfg.max_iterations < 1) {
    throw Error(Errc::InvalidConfig, "solver max_iterations must be at least 1");
  }
}

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::ClosedForm: return "closed_form";
    case Termination::GradientTolerance: return "gradient_tolerance";
    case Termination::StepTolerance: return "step_tolerance";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::LineSearchFailure: return "line_search_failure";
  }
  return "closed_form";
}

double min_singular_value(const kernels::DirectionView& b, std::span<const double> weights) {
  Mat3 gram = Mat3::Zero();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Vec3 u(b.ux[i], b.uy[i], b.uz[i]);
    gram.noalias() += weights[i] * (u * u.transpose());
  }
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues()(0)));
}

Vec3 weighted_least_squares(const kernels::DirectionView& b, std::span<const double> weights) {
  const auto n = static_cast<Eigen::Index>(b.size());
  if (n < 3) {
    throw Error(Errc::NotEnoughDetections, "need 3 detections, have " + std::to_string(n));
  }
  if (min_singular_value(b, weights) < kRankTolerance) {
    throw Error(Errc::RankDeficient, "directions span fewer than 3 dimensions");
  }
  Eigen::MatrixX3d a(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = std::sqrt(weights[static_cast<std::size_t>(i)]);
    const auto k = static_cast<std::size_t>(i);
    a.row(i) << s * b.ux[k], s * b.uy[k], s * b.uz[k];
    rhs(i) = -s * b.doppler[k];
  }
  return a.householderQr().solve(rhs);
}

namespace {

std::vector<double> masked(std::span<const double> values, std::span<const std::uint8_t> mask,
                           std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask.empty() && mask[i] == 0) continue;
    out.push_back(values.empty() ? 1.0 : values[i]);
  }
  return out;
}

}  // namespace

RobustObjective::RobustObjective(kernels::DirectionBlock block, std::vector<double> weights,
                                 LossSpec loss)
    : block_(std::move(block)), weights_(std::move(weights)), loss_(loss) {
  validate(loss_);
  scratch_.resize(block_.size());
  coeff_.resize(block_.size());
}

RobustObjective::RobustObjective(const RadarScan& scan, std::span<const std::uint8_t> mask,
                                 const LossSpec& loss)
    : RobustObjective(kernels::DirectionBlock(scan, mask),
                      masked(scan_weights(scan, loss), mask, scan.size()), loss) {}

RobustObjective::Value RobustObjective::evaluate(const Vec3& v) const {
  const auto view = block_.view();
  kernels::residuals(view, v, scratch_);
  for (std::size_t i = 0; i < scratch_.size(); ++i) {
    const double r = scratch_[i];
    coeff_[i] = eval_grad(loss_, r, weights_[i]);
    scratch_[i] = eval(loss_, r, weights_[i]);
  }
  return {kernels::sum(scratch_), kernels::weighted_direction_sum(view, coeff_)};
}

double RobustObjective::residual_rms(const Vec3& v) const {
  if (block_.size() == 0) return 0.0;
  kernels::residuals(block_.view(), v, scratch_);
  for (double& r : scratch_) r *= r;
  return std::sqrt(kernels::sum(scratch_) / static_cast<double>(scratch_.size()));
}

double RobustObjective::curvature_floor(const Vec3& v) const {
  kernels::residuals(block_.view(), v, scratch_);
  for (std::size_t i = 0; i < scratch_.size(); ++i) {
    coeff_[i] = weights_[i] * irls_weight(loss_, scratch_[i]);
  }
  return min_singular_value(block_.view(), coeff_);
}

RobustObjective::Value objective_and_gradient(const RadarScan& scan,
                                              std::span<const std::uint8_t> mask,
                                              const LossSpec& loss, const Vec3& v) {
  return RobustObjective(scan, mask, loss).evaluate(v);
}

SolveResult solve_linear_ls(const RadarScan& scan, std::span<const std::uint8_t> mask,
                            std::span<const double> weights) {
  const kernels::DirectionBlock block(scan, mask);
  std::vector<double> w = masked(weights, mask, scan.size());
  const Vec3 v = weighted_least_squares(block.view(), w);

  const RobustObjective quadratic(block, std::move(w), LossSpec::l2());
  const auto value = quadratic.evaluate(v);
  SolveResult result;
  result.velocity = v;
  result.objective = value.value;
  result.gradient_norm = value.gradient.norm();
  result.converged = true;
  result.termination = Termination::ClosedForm;
  result.residual_rms = quadratic.residual_rms(v);
  result.objective_trace = {value.value};
  return result;
}

namespace {

// One-dimensional restriction phi(a) = f(x + a p).
struct LineFunction {
  const RobustObjective& objective;
  const Vec3& x;
  const Vec3& p;

  struct Sample {
    double step;
    double value;
    double slope;
    Vec3 gradient;
  };

  Sample at(double step) const {
    const auto v = objective.evaluate(x + step * p);
    if (!std::isfinite(v.value) || !all_finite(v.gradient)) {
      throw Error(Errc::NonFinite, "objective became non-finite during line search");
    }
    return {step, v.value, v.gradient.dot(p), v.gradient};
  }
};

// Minimizer of the cubic through (a, fa, da) and (b, fb, db), or NaN.
double cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (disc < 0.0) return std::nan("");
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  return b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
}

struct LineSearchResult {
  bool found = false;
  LineFunction::Sample sample;
};

// Strong-Wolfe bracketing search followed by safeguarded cubic zoom.
LineSearchResult strong_wolfe(const LineFunction& phi, const LineFunction::Sample& origin,
                              double initial_step, const SolverConfig& cfg) {
  constexpr int kMaxBracket = 40;
  constexpr int kMaxZoom = 60;
  const double f0 = origin.value;
  const double d0 = origin.slope;
  // Once the demanded decrease is below the rounding of f0, values can no
  // longer rank steps; accept anything within that rounding and let the
  // curvature condition decide.
  const double resolution = 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(f0);
  const auto armijo = [&](const LineFunction::Sample& s) {
    if (s.value <= f0 + cfg.wolfe_c1 * s.step * d0) return true;
    return -cfg.wolfe_c1 * s.step * d0 <= resolution && s.value <= f0 + resolution;
  };
  const auto curvature = [&](const LineFunction::Sample& s) {
    return std::fabs(s.slope) <= -cfg.wolfe_c2 * d0;
  };

  LineSearchResult best;  // lowest sufficient-decrease sample seen, as a fallback
  const auto remember = [&](const LineFunction::Sample& s) {
    if (armijo(s) && s.value < f0 && (!best.found || s.value < best.sample.value)) {
      best = {true, s};
    }
  };

  const auto zoom = [&](LineFunction::Sample lo, LineFunction::Sample hi) -> LineSearchResult {
    for (int j = 0; j < kMaxZoom; ++j) {
      const double width = hi.step - lo.step;
      if (std::fabs(width) < 1e-16 * std::max(1.0, std::fabs(lo.step))) break;
      double trial = cubic_minimizer(lo.step, lo.value, lo.slope, hi.step, hi.value, hi.slope);
      const double low = std::min(lo.step, hi.step) + 0.1 * std::fabs(width);
      const double high = std::max(lo.step, hi.step) - 0.1 * std::fabs(width);
      if (!std::isfinite(trial) || trial < low || trial > high) trial = 0.5 * (lo.step + hi.step);
      const auto s = phi.at(trial);
      remember(s);
      if (!armijo(s) || s.value >= lo.value) {
        hi = s;
      } else {
        if (curvature(s)) return {true, s};
        if (s.slope * (hi.step - lo.step) >= 0.0) hi = lo;
        lo = s;
      }
    }
    return best;
  };

  LineFunction::Sample prev = origin;
  double step = initial_step;
  for (int i = 0; i < kMaxBracket; ++i) {
    const auto s = phi.at(step);
    remember(s);
    if (!armijo(s) || (i > 0 && s.value >= prev.value)) return zoom(prev, s);
    if (curvature(s)) return {true, s};
    if (s.slope >= 0.0) return zoom(s, prev);
    prev = s;
    step *= 2.0;
  }
  return best;
}

}  // namespace

SolveResult minimize_bfgs(const RobustObjective& objective, const SolverConfig& cfg,
                          const Vec3& initial) {
  validate(cfg);
  if (!all_finite(initial)) throw Error(Errc::NonFinite, "initial point is not finite");

  SolveResult result;
  Vec3 x = initial;
  auto current = objective.evaluate(x);
  if (!std::isfinite(current.value) || !all_finite(current.gradient)) {
    throw Error(Errc::NonFinite, "objective is not finite at the initial point");
  }
  result.objective_trace.push_back(current.value);

  Mat3 inv_hessian = Mat3::Identity();
  bool scaled = false;
  result.termination = Termination::MaxIterations;

  int iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    if (current.gradient.norm() < cfg.grad_tolerance) {
      result.termination = Termination::GradientTolerance;
      break;
    }
    Vec3 dir = -inv_hessian * current.gradient;
    if (!(dir.dot(current.gradient) < 0.0)) {
      inv_hessian.setIdentity();
      scaled = false;
      dir = -current.gradient;
    }

    const LineFunction phi{objective, x, dir};
    const LineFunction::Sample origin{0.0, current.value, current.gradient.dot(dir),
                                      current.gradient};
    const auto ls = strong_wolfe(phi, origin, 1.0, cfg);
    if (!ls.found) {
      result.termination = Termination::LineSearchFailure;
      break;
    }

    const Vec3 s = ls.sample.step * dir;
    const Vec3 y = ls.sample.gradient - current.gradient;
    x += s;
    current = {ls.sample.value, ls.sample.gradient};
    result.objective_trace.push_back(current.value);

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        inv_hessian = (sy / y.squaredNorm()) * Mat3::Identity();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Mat3 left = Mat3::Identity() - rho * s * y.transpose();
      inv_hessian = left * inv_hessian * left.transpose() + rho * s * s.transpose();
    } else {
      inv_hessian.setIdentity();
      scaled = false;
    }

    if (s.norm() < cfg.step_tolerance) {
      ++iter;
      result.termination = current.gradient.norm() < cfg.grad_tolerance
                               ? Termination::GradientTolerance
                               : Termination::StepTolerance;
      break;
    }
  }
  if (iter == cfg.max_iterations && current.gradient.norm() < cfg.grad_tolerance) {
    result.termination = Termination::GradientTolerance;
  }

  result.velocity = x;
  result.objective = current.value;
  result.gradient_norm = current.gradient.norm();
  result.iterations = iter;
  result.converged = result.termination == Termination::GradientTolerance;
  result.residual_rms = objective.residual_rms(x);
  return result;
}

SolveResult solve_robust(const RadarScan& scan, std::span<const std::uint8_t> mask,
                         const LossSpec& loss, const SolverConfig& solver, const Vec3& initial) {
  const RobustObjective objective(scan, mask, loss);
  if (objective.size() < 3) {
    throw Error(Errc::NotEnoughDetections,
                "need 3 detections, have " + std::to_string(objective.size()));
  }
  if (min_singular_value(objective.directions(), objective.weights()) < kRankTolerance) {
    throw Error(Errc::RankDeficient, "directions span fewer than 3 dimensions");
  }
  SolveResult result = minimize_bfgs(objective, solver, initial);
  if (objective.curvature_floor(result.velocity) < kRankTolerance) {
    throw Error(Errc::RankDeficient, "robust solution is not locally determined");
  }
  return result;
}

}  // namespace radvel
