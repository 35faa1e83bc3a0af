#include "radvel/motion_gate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace radvel {

void validate(const ZeroVelocityConfig& cfg) {
  if (!(cfg.doppler_threshold > 0.0)) {
    throw Error(Errc::InvalidConfig, "zero_velocity doppler_threshold must be positive");
  }
  if (!(cfg.max_exceed_fraction >= 0.0 && cfg.max_exceed_fraction <= 1.0)) {
    throw Error(Errc::InvalidConfig, "zero_velocity max_exceed_fraction must be in [0,1]");
  }
  if (cfg.min_detections < 1) {
    throw Error(Errc::InvalidConfig, "zero_velocity min_detections must be at least 1");
  }
}

bool detect_zero_velocity(const RadarScan& scan, const ZeroVelocityConfig& cfg) {
  const std::size_t n = scan.size();
  if (n == 0 || n < static_cast<std::size_t>(cfg.min_detections)) return false;

  std::vector<double> speeds;
  speeds.reserve(n);
  std::size_t exceeding = 0;
  for (const auto& d : scan.detections) {
    const double s = std::fabs(d.doppler);
    speeds.push_back(s);
    if (s >= cfg.doppler_threshold) ++exceeding;
  }
  const auto mid = speeds.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(speeds.begin(), mid, speeds.end());
  double median = *mid;
  if (n % 2 == 0) median = 0.5 * (median + *std::max_element(speeds.begin(), mid));

  const double fraction = static_cast<double>(exceeding) / static_cast<double>(n);
  return median < cfg.doppler_threshold && fraction <= cfg.max_exceed_fraction;
}

std::string_view to_string(GateCombination c) noexcept {
  return c == GateCombination::RejectOnEither ? "reject_on_either" : "require_both";
}

void validate(const FilterConfig& cfg) {
  if (cfg.window_size < 1) throw Error(Errc::InvalidConfig, "filter window_size must be at least 1");
  if (!(cfg.norm_threshold > 0.0)) {
    throw Error(Errc::InvalidConfig, "filter norm_threshold must be positive");
  }
  if (!(cfg.max_acceleration > 0.0)) {
    throw Error(Errc::InvalidConfig, "filter max_acceleration must be positive");
  }
}

std::string_view to_string(GateReason r) noexcept {
  switch (r) {
    case GateReason::None: return "none";
    case GateReason::NormJump: return "norm_jump";
    case GateReason::Acceleration: return "acceleration";
    case GateReason::NormJumpAndAcceleration: return "norm_jump_and_acceleration";
    case GateReason::NonMonotonicTimestamp: return "non_monotonic_timestamp";
  }
  return "none";
}

GateOutcome filter_step(FilterState& state, const FilterConfig& cfg,
                        const VelocityEstimate& candidate) {
  const bool zero = candidate.status == EstimateStatus::ZeroVelocity;
  const Vec3 v = zero ? Vec3::Zero() : candidate.velocity;
  const auto capacity = static_cast<std::size_t>(cfg.window_size) + 1;

  GateOutcome out{GateDecision::Accept, GateReason::None};
  auto& window = state.window;
  if (!window.empty()) {
    const WindowEntry& last = window.back();
    const double dt = candidate.timestamp - last.timestamp;
    if (!(dt > 0.0)) return {GateDecision::Reject, GateReason::NonMonotonicTimestamp};

    out.acceleration = (v - last.velocity).norm() / dt;
    const bool accel_ok = out.acceleration < cfg.max_acceleration;
    bool norm_ok = true;
    const bool warm = state.warm(cfg);
    if (warm) {
      double total = 0.0;
      for (auto it = window.end() - cfg.window_size; it != window.end(); ++it) total += it->velocity.norm();
      out.mean_norm = total / cfg.window_size;
      norm_ok = std::fabs(out.mean_norm - v.norm()) < cfg.norm_threshold;
    }

    if (!norm_ok && !accel_ok) {
      out.reason = GateReason::NormJumpAndAcceleration;
    } else if (!norm_ok) {
      out.reason = GateReason::NormJump;
    } else if (!accel_ok) {
      out.reason = GateReason::Acceleration;
    }

    bool accept = true;
    if (!warm) {
      accept = accel_ok;
    } else if (cfg.combination == GateCombination::RejectOnEither) {
      accept = norm_ok && accel_ok;
    } else {
      accept = norm_ok || accel_ok;
    }
    if (zero) accept = true;
    if (!accept) {
      out.decision = GateDecision::Reject;
      return out;
    }
  }

  window.push_back({candidate.timestamp, v});
  while (window.size() > capacity) window.pop_front();
  return out;
}

}  // namespace radvel
