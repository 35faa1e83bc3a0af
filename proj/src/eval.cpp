#include "radvel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/LU>

namespace radvel::metrics {

void ExtrinsicSpec::validate() const {
  if (!all_finite(lever_arm) || !rotation.allFinite()) {
    throw Error(Errc::InvalidConfig, "extrinsics must be finite");
  }
  if (!(rotation.transpose() * rotation).isApprox(Mat3::Identity(), 1e-9) ||
      std::fabs(rotation.determinant() - 1.0) > 1e-9) {
    throw Error(Errc::InvalidConfig, "rotation must be orthonormal with determinant +1");
  }
}

Vec3 transfer_velocity(const GroundTruthSample& sample, const ExtrinsicSpec& ext) {
  return ext.rotation * (sample.velocity + sample.angular_velocity.cross(ext.lever_arm));
}

void validate(std::span<const GroundTruthSample> samples) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.timestamp) || !all_finite(s.velocity) || !all_finite(s.angular_velocity)) {
      throw Error(Errc::InvalidConfig, "ground truth sample " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(s.timestamp > samples[i - 1].timestamp)) {
      throw Error(Errc::InvalidConfig,
                  "ground truth timestamps must strictly increase (sample " + std::to_string(i) + ")");
    }
  }
}

GroundTruthSample interpolate_gt(std::span<const GroundTruthSample> samples, double t) {
  if (samples.empty() || !(t >= samples.front().timestamp) || !(t <= samples.back().timestamp)) {
    throw Error(Errc::OutOfSpan, "t=" + std::to_string(t) + " outside the ground-truth span");
  }
  const auto hi = std::lower_bound(samples.begin(), samples.end(), t,
                                   [](const GroundTruthSample& s, double x) { return s.timestamp < x; });
  if (hi->timestamp == t) return *hi;
  const auto& b = *hi;
  const auto& a = *(hi - 1);
  const double f = (t - a.timestamp) / (b.timestamp - a.timestamp);
  GroundTruthSample out;
  out.timestamp = t;
  out.velocity = a.velocity + f * (b.velocity - a.velocity);
  out.angular_velocity = a.angular_velocity + f * (b.angular_velocity - a.angular_velocity);
  out.frame = a.frame;
  return out;
}

ErrorReport score(std::span<const VelocityEstimate> estimates,
                  std::span<const GroundTruthSample> gt, const ExtrinsicSpec& ext) {
  ErrorReport report;
  Vec3 abs_sum = Vec3::Zero();
  Vec3 sq_sum = Vec3::Zero();
  for (const auto& e : estimates) {
    const bool scored =
        e.status == EstimateStatus::Estimated || e.status == EstimateStatus::ZeroVelocity;
    if (!scored || gt.empty() || !(e.timestamp >= gt.front().timestamp) ||
        !(e.timestamp <= gt.back().timestamp)) {
      ++report.n_excluded;
      continue;
    }
    const Vec3 truth = transfer_velocity(interpolate_gt(gt, e.timestamp), ext);
    const Vec3 err = e.velocity - truth;
    abs_sum += err.cwiseAbs();
    sq_sum += err.cwiseProduct(err);
    ++report.n_pairs;
  }
  if (report.n_pairs == 0) {
    throw Error(Errc::NoPairs, "none of " + std::to_string(estimates.size()) +
                                   " estimates could be paired with ground truth");
  }
  const double n = report.n_pairs;
  report.ave = abs_sum / n;
  report.rmse = (sq_sum / n).cwiseSqrt();
  return report;
}

}  // namespace radvel::metrics
