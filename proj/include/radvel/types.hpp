#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "radvel/error.hpp"

namespace radvel {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Detections closer to the sensor than this have no usable direction.
inline constexpr double kMinRange = 1e-9;

/// One radar return. The Doppler sign follows the static-target model
/// -doppler = (p / |p|) . v, i.e. a target ahead of a forward-moving sensor
/// reports a negative Doppler.
struct Detection {
  Vec3 position = Vec3::Zero();
  double doppler = 0.0;
  double snr = 1.0;  // stored as 1.0 when the source carries no intensity
};

struct RadarScan {
  double timestamp = 0.0;
  std::vector<Detection> detections;  // order is significant, see rejection.hpp

  std::size_t size() const noexcept { return detections.size(); }
};

enum class EstimateStatus : std::uint8_t { Estimated, ZeroVelocity, Rejected, Degenerate };

std::string_view to_string(EstimateStatus status) noexcept;
EstimateStatus parse_status(std::string_view text);

struct VelocityEstimate {
  double timestamp = 0.0;
  Vec3 velocity = Vec3::Zero();
  EstimateStatus status = EstimateStatus::Degenerate;
  int inlier_count = 0;
  int total_count = 0;
  double residual_rms = 0.0;
};

/// A unit-length line-of-sight vector. Only constructible through
/// direction_of() or from_unit(), so holders can rely on |dir| = 1.
class UnitDirection {
 public:
  const Vec3& vec() const noexcept { return dir_; }
  double x() const noexcept { return dir_.x(); }
  double y() const noexcept { return dir_.y(); }
  double z() const noexcept { return dir_.z(); }

  /// Normalizes an arbitrary nonzero vector.
  static UnitDirection from_vector(const Vec3& v);

 private:
  explicit UnitDirection(const Vec3& unit) : dir_(unit) {}
  Vec3 dir_;
};

/// Throws Errc::ZeroRangeDetection when |position| < kMinRange.
UnitDirection direction_of(const Detection& d);

/// Doppler that a static target along `u` shows for sensor velocity `v`.
double predict_doppler(const UnitDirection& u, const Vec3& v) noexcept;

/// Signed violation of the static-target Doppler constraint.
double residual(const Detection& d, const Vec3& v);

/// Throws Errc::InvalidDetection on non-finite fields or negative SNR, and
/// Errc::ZeroRangeDetection for detections at the origin.
void validate(const Detection& d);
void validate(const RadarScan& scan);

bool all_finite(const Vec3& v) noexcept;

}  // namespace radvel
