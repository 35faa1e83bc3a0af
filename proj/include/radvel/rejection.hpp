#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "radvel/types.hpp"

namespace radvel {

using InlierMask = std::vector<std::uint8_t>;

enum class RejectorMethod : std::uint8_t { Ransac, Mlesac, Gnc, None };

std::string_view to_string(RejectorMethod method) noexcept;

/// GNC is documented as unsuitable above this many observations; larger
/// scans still run but the report is flagged.
inline constexpr std::size_t kGncRecommendedMaxSize = 100;

struct RejectorConfig {
  RejectorMethod method = RejectorMethod::Ransac;
  double inlier_threshold = 0.15;  // m/s; also the GNC-TLS residual bound
  int max_iterations = 200;
  double confidence = 0.99;
  std::uint64_t seed = 42;
  double mlesac_sigma = 0.05;         // m/s
  double mlesac_outlier_span = 20.0;  // m/s
  int mlesac_em_steps = 5;
  double gnc_mu_init = 1e6;  // upper bound on the residual-derived starting mu
  double gnc_mu_divisor = 1.4;
  int gnc_max_outer = 100;
  double min_coplanarity = 1e-3;  // minimal |det| of a sample's direction matrix
};

/// Throws Errc::InvalidConfig on out-of-range fields.
void validate(const RejectorConfig& cfg);

struct InlierReport {
  InlierMask inlier_mask;
  Vec3 hypothesis = Vec3::Zero();
  /// RANSAC: inlier count. MLESAC: negative log-likelihood. GNC: final
  /// surrogate cost.
  double score = 0.0;
  int iterations_used = 0;
  bool converged = true;               // GNC only; sampling methods always set true
  bool above_recommended_size = false;  // GNC only

  std::size_t inlier_count() const noexcept;
};

/// Exact velocity from three detections. Throws Errc::DegenerateSample when
/// |det| of the stacked directions is below `min_coplanarity`.
Vec3 solve_three_point(const Detection& d1, const Detection& d2, const Detection& d3,
                       double min_coplanarity = 1e-3);

/// Sampling consensus scored by inlier count. Deterministic for a fixed seed.
/// Throws Errc::NotEnoughDetections (< 3) or Errc::NoValidHypothesis.
InlierReport run_ransac(const RadarScan& scan, const RejectorConfig& cfg);

/// Same sampling loop, scored by the negative log-likelihood of a
/// Gaussian-inlier / uniform-outlier mixture with EM-refined mixing weight.
InlierReport run_mlesac(const RadarScan& scan, const RejectorConfig& cfg);

/// Negative log-likelihood MLESAC assigns to `hypothesis` on `scan`.
double mlesac_score(const RadarScan& scan, const Vec3& hypothesis, const RejectorConfig& cfg);

/// Graduated non-convexity with the truncated-least-squares surrogate,
/// started from `initial`. Never throws on non-convergence; the report is
/// flagged instead. Throws Errc::NotEnoughDetections and Errc::RankDeficient.
InlierReport run_gnc(const RadarScan& scan, const RejectorConfig& cfg, const Vec3& initial);

/// All-true mask with the given hypothesis.
InlierReport run_passthrough(const RadarScan& scan, const Vec3& hypothesis);

/// Iterations needed to draw an all-inlier triple with probability
/// `confidence` given `inlier_ratio`, capped at `cap`.
int adaptive_iterations(double inlier_ratio, double confidence, int cap) noexcept;

}  // namespace radvel
