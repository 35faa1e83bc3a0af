#pragma once

#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "radvel/types.hpp"

namespace radvel {

enum class LossKind : std::uint8_t { L2, TruncatedL2, Huber, Cauchy, BarronGeneral };

std::string_view to_string(LossKind kind) noexcept;

/// Per-residual loss kernel rho(x) with scale `scale` (c) and, for the
/// general family, shape `alpha`.
///
/// Kernels (all even, rho(0) = 0, nondecreasing in |x|):
///   L2             x^2 / 2
///   TruncatedL2    min(x^2, t^2) / 2, t = truncation
///   Huber          x^2 / 2 for |x| <= c, c (|x| - c/2) beyond
///   Cauchy         (c^2 / 2) log(1 + (x/c)^2)
///   BarronGeneral  |a-2|/a * (((x/c)^2 / |a-2| + 1)^(a/2) - 1), with the
///                  removable limits a = 2 (quadratic), a = 0 (log) and
///                  a = -inf (Welsch) evaluated in closed form.
///
/// Cauchy with scale c equals (c^2 / 2) times BarronGeneral(alpha = 0) with
/// scale c / sqrt(2).
///
/// snr_weighting turns L2 into weighted LS and TruncatedL2 into weighted TLS;
/// it applies to the other kernels as well.
struct LossSpec {
  LossKind kind = LossKind::L2;
  double scale = 0.2;
  double alpha = 1.0;
  double truncation = 0.3;
  bool snr_weighting = false;

  static LossSpec l2(bool weighted = false) { return {LossKind::L2, 1.0, 2.0, 0.3, weighted}; }
  static LossSpec truncated_l2(double truncation = 0.3, bool weighted = false) {
    return {LossKind::TruncatedL2, 1.0, 2.0, truncation, weighted};
  }
  static LossSpec huber(double c = 0.1) { return {LossKind::Huber, c, 2.0, 0.3, false}; }
  static LossSpec cauchy(double c = 0.2) { return {LossKind::Cauchy, c, 0.0, 0.3, false}; }
  static LossSpec barron(double alpha, double c = 0.2) {
    return {LossKind::BarronGeneral, c, alpha, 0.3, false};
  }

  // Named members of the general family.
  static LossSpec geman_mcclure(double c = 0.2) { return barron(-2.0, c); }
  static LossSpec l1_l2(double c = 0.2) { return barron(1.0, c); }
  static LossSpec welsch(double c = 0.2) {
    return barron(-std::numeric_limits<double>::infinity(), c);
  }
};

/// Throws Errc::InvalidLossSpec unless scale > 0, truncation > 0 and alpha
/// is finite or -inf.
void validate(const LossSpec& spec);

/// w * rho(x).
double eval(const LossSpec& spec, double x, double w = 1.0);

/// d/dx of eval(). Zero on the TruncatedL2 plateau, including its boundary.
double eval_grad(const LossSpec& spec, double x, double w = 1.0);

/// rho'(x) / x, with the x -> 0 limit. Used as the effective per-residual
/// curvature when checking the conditioning of a robust solve.
double irls_weight(const LossSpec& spec, double x);

/// SNR of `d` normalized by `max_snr` when weighting is on, else 1. A
/// nonpositive max_snr (all-zero scan) yields 1.
double weight_of(const Detection& d, const LossSpec& spec, double max_snr);

/// Weights for every detection of `scan`, normalized by the scan maximum.
std::vector<double> scan_weights(const RadarScan& scan, const LossSpec& spec);

}  // namespace radvel
