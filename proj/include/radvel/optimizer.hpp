#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "radvel/kernels.hpp"
#include "radvel/loss.hpp"
#include "radvel/types.hpp"

namespace radvel {

struct SolverConfig {
  double grad_tolerance = 1e-8;
  double step_tolerance = 1e-10;
  int max_iterations = 100;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
};

/// Throws Errc::InvalidConfig unless 0 < c1 < c2 < 1 and tolerances > 0.
void validate(const SolverConfig& cfg);

enum class Termination : std::uint8_t {
  ClosedForm,
  GradientTolerance,
  StepTolerance,
  MaxIterations,
  LineSearchFailure,
};

std::string_view to_string(Termination t) noexcept;

struct SolveResult {
  Vec3 velocity = Vec3::Zero();
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  /// True only when the gradient criterion was met. A step-length stall is
  /// reported through `termination` and leaves this false.
  bool converged = false;
  Termination termination = Termination::ClosedForm;
  double residual_rms = 0.0;  // unweighted, over the selected detections
  /// Objective at the start and after every accepted BFGS step.
  std::vector<double> objective_trace;
};

/// Singular values below this mark the stacked (weighted) direction matrix
/// as rank deficient.
inline constexpr double kRankTolerance = 1e-6;

/// Smallest singular value of the rows sqrt(w_i) * u_i.
double min_singular_value(const kernels::DirectionView& b, std::span<const double> weights);

/// argmin_v sum_i w_i (doppler_i + u_i . v)^2 by Householder QR of the
/// weighted system. Throws Errc::RankDeficient.
Vec3 weighted_least_squares(const kernels::DirectionView& b, std::span<const double> weights);

/// Closed-form (weighted) linear least squares over the masked detections.
/// `weights` is indexed like scan.detections; empty means unit weights.
SolveResult solve_linear_ls(const RadarScan& scan, std::span<const std::uint8_t> mask,
                            std::span<const double> weights = {});

/// f(v) = sum_i w_i rho(doppler_i + u_i . v) over a fixed detection set.
class RobustObjective {
 public:
  RobustObjective(kernels::DirectionBlock block, std::vector<double> weights, LossSpec loss);
  /// Masked detections of `scan`, weights from loss.snr_weighting.
  RobustObjective(const RadarScan& scan, std::span<const std::uint8_t> mask, const LossSpec& loss);

  struct Value {
    double value = 0.0;
    Vec3 gradient = Vec3::Zero();
  };

  Value evaluate(const Vec3& v) const;
  /// Residual RMS (unweighted) at v.
  double residual_rms(const Vec3& v) const;
  /// Smallest singular value of sqrt(w_i * rho'(r_i)/r_i) u_i at v.
  double curvature_floor(const Vec3& v) const;

  std::size_t size() const noexcept { return block_.size(); }
  const LossSpec& loss() const noexcept { return loss_; }
  kernels::DirectionView directions() const noexcept { return block_.view(); }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  kernels::DirectionBlock block_;
  std::vector<double> weights_;
  LossSpec loss_;
  mutable std::vector<double> scratch_;
  mutable std::vector<double> coeff_;
};

RobustObjective::Value objective_and_gradient(const RadarScan& scan,
                                              std::span<const std::uint8_t> mask,
                                              const LossSpec& loss, const Vec3& v);

/// BFGS with a strong-Wolfe line search on a prepared objective.
/// Throws Errc::NonFinite if the objective or gradient stops being finite.
SolveResult minimize_bfgs(const RobustObjective& objective, const SolverConfig& cfg,
                          const Vec3& initial);

/// Robust solve over the masked detections. Throws Errc::NotEnoughDetections,
/// Errc::RankDeficient (before or after the solve) and Errc::NonFinite.
SolveResult solve_robust(const RadarScan& scan, std::span<const std::uint8_t> mask,
                         const LossSpec& loss, const SolverConfig& solver, const Vec3& initial);

}  // namespace radvel
