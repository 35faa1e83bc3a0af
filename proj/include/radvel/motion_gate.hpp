#pragma once

#include <deque>
#include <string_view>

#include "radvel/types.hpp"

namespace radvel {

struct ZeroVelocityConfig {
  double doppler_threshold = 0.05;   // m/s
  double max_exceed_fraction = 0.25;
  int min_detections = 5;
};

void validate(const ZeroVelocityConfig& cfg);

/// True iff the scan has at least min_detections returns, the median
/// |doppler| is below the threshold, and at most max_exceed_fraction of the
/// returns reach it.
bool detect_zero_velocity(const RadarScan& scan, const ZeroVelocityConfig& cfg);

enum class GateCombination : std::uint8_t {
  /// Accept only when both the norm and the acceleration checks pass.
  RejectOnEither,
  /// Reject only when both checks fail.
  RequireBoth,
};

std::string_view to_string(GateCombination c) noexcept;

struct FilterConfig {
  int window_size = 5;          // N
  double norm_threshold = 7.5;  // m/s
  double max_acceleration = 10.0;  // m/s^2
  GateCombination combination = GateCombination::RejectOnEither;
};

void validate(const FilterConfig& cfg);

struct WindowEntry {
  double timestamp;
  Vec3 velocity;

  bool operator==(const WindowEntry&) const = default;
};

/// Accepted estimates, oldest first. Holds up to N+1 entries so the newest
/// one is available for the acceleration check next to the N used for the
/// mean norm.
struct FilterState {
  std::deque<WindowEntry> window;

  /// The window holds at least N entries.
  bool warm(const FilterConfig& cfg) const noexcept {
    return window.size() >= static_cast<std::size_t>(cfg.window_size);
  }
  bool operator==(const FilterState&) const = default;
};

enum class GateDecision : std::uint8_t { Accept, Reject };

enum class GateReason : std::uint8_t {
  None,
  NormJump,
  Acceleration,
  NormJumpAndAcceleration,
  NonMonotonicTimestamp,
};

std::string_view to_string(GateReason r) noexcept;

struct GateOutcome {
  GateDecision decision;
  GateReason reason;
  double mean_norm = 0.0;     // over the last N entries, 0 when cold
  double acceleration = 0.0;  // implied by the last accepted entry, 0 when empty
};

/// Feasibility check of one candidate against the window. Accepted
/// candidates are appended (the oldest entry beyond N+1 is dropped); a
/// rejection leaves `state` untouched. ZeroVelocity candidates are always
/// accepted and enter the window as the zero vector, provided their
/// timestamp advances the stream.
GateOutcome filter_step(FilterState& state, const FilterConfig& cfg, const VelocityEstimate& candidate);

}  // namespace radvel
