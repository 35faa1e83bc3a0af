#pragma once

#include <span>
#include <string>
#include <vector>

#include "radvel/types.hpp"

namespace radvel::metrics {

struct GroundTruthSample {
  double timestamp = 0.0;
  Vec3 velocity = Vec3::Zero();          // body point velocity
  Vec3 angular_velocity = Vec3::Zero();  // rad/s
  std::string frame;
};

/// Radar pose relative to the ground-truth body point.
struct ExtrinsicSpec {
  Vec3 lever_arm = Vec3::Zero();    // body point -> radar, body frame
  Mat3 rotation = Mat3::Identity();  // body -> radar

  /// Throws Errc::InvalidConfig unless rotation is orthonormal with det +1.
  void validate() const;
};

struct ErrorReport {
  Vec3 ave = Vec3::Zero();   // per-axis mean absolute error
  Vec3 rmse = Vec3::Zero();  // per-axis root-mean-square error
  int n_pairs = 0;
  int n_excluded = 0;
};

/// Rigid-body transfer to the radar origin: rotation * (v + w x lever_arm).
Vec3 transfer_velocity(const GroundTruthSample& sample, const ExtrinsicSpec& ext);

/// Component-wise linear interpolation between the samples bracketing t.
/// Throws Errc::OutOfSpan outside [first, last].
GroundTruthSample interpolate_gt(std::span<const GroundTruthSample> samples, double t);

/// Throws Errc::InvalidConfig unless timestamps strictly increase and every
/// value is finite.
void validate(std::span<const GroundTruthSample> samples);

/// Scores Estimated and ZeroVelocity entries against interpolated ground
/// truth; everything else, and anything outside the ground-truth span, is
/// counted in n_excluded. Throws Errc::NoPairs when nothing is left.
ErrorReport score(std::span<const VelocityEstimate> estimates,
                  std::span<const GroundTruthSample> gt, const ExtrinsicSpec& ext);

}  // namespace radvel::metrics
