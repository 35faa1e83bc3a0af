#include "radvel/types.hpp"

#include <cmath>
#include <string>

namespace radvel {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::ZeroRangeDetection: return "ZeroRangeDetection";
    case Errc::InvalidDetection: return "InvalidDetection";
    case Errc::InvalidLossSpec: return "InvalidLossSpec";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::DegenerateSample: return "DegenerateSample";
    case Errc::NotEnoughDetections: return "NotEnoughDetections";
    case Errc::NoValidHypothesis: return "NoValidHypothesis";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::NonFinite: return "NonFinite";
    case Errc::OutOfSpan: return "OutOfSpan";
    case Errc::NoPairs: return "NoPairs";
    case Errc::ParseError: return "ParseError";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::NonMonotonicScanId: return "NonMonotonicScanId";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(EstimateStatus status) noexcept {
  switch (status) {
    case EstimateStatus::Estimated: return "estimated";
    case EstimateStatus::ZeroVelocity: return "zero_velocity";
    case EstimateStatus::Rejected: return "rejected";
    case EstimateStatus::Degenerate: return "degenerate";
  }
  return "degenerate";
}

EstimateStatus parse_status(std::string_view text) {
  if (text == "estimated") return EstimateStatus::Estimated;
  if (text == "zero_velocity") return EstimateStatus::ZeroVelocity;
  if (text == "rejected") return EstimateStatus::Rejected;
  if (text == "degenerate") return EstimateStatus::Degenerate;
  throw Error(Errc::ParseError, "unknown status '" + std::string(text) + "'");
}

bool all_finite(const Vec3& v) noexcept {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

UnitDirection UnitDirection::from_vector(const Vec3& v) {
  const double n = v.norm();
  if (!(n >= kMinRange)) {
    throw Error(Errc::ZeroRangeDetection, "cannot normalize a vector of length " + std::to_string(n));
  }
  return UnitDirection(v / n);
}

UnitDirection direction_of(const Detection& d) { return UnitDirection::from_vector(d.position); }

double predict_doppler(const UnitDirection& u, const Vec3& v) noexcept { return -u.vec().dot(v); }

double residual(const Detection& d, const Vec3& v) { return d.doppler - predict_doppler(direction_of(d), v); }

void validate(const Detection& d) {
  if (!all_finite(d.position) || !std::isfinite(d.doppler) || !std::isfinite(d.snr)) {
    throw Error(Errc::InvalidDetection, "detection has non-finite fields");
  }
  if (d.snr < 0.0) {
    throw Error(Errc::InvalidDetection, "negative snr " + std::to_string(d.snr));
  }
  if (d.position.norm() < kMinRange) {
    throw Error(Errc::ZeroRangeDetection, "detection at the sensor origin");
  }
}

void validate(const RadarScan& scan) {
  if (!std::isfinite(scan.timestamp)) {
    throw Error(Errc::InvalidDetection, "scan timestamp is not finite");
  }
  for (const auto& d : scan.detections) validate(d);
}

}  // namespace radvel
