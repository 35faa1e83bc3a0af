#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "radvel/rejection.hpp"
#include "radvel/types.hpp"

namespace radvel::synth {

enum class DirectionModel : std::uint8_t { FullSphere, ForwardCone };

struct SceneSpec {
  int n_static = 100;
  int n_dynamic = 0;
  int n_ghost = 0;
  Vec3 ego_velocity = Vec3::Zero();
  /// Radial speed of each dynamic target, uniform in [min, range] m/s.
  double dynamic_offset_min = 0.5;
  double dynamic_velocity_range = 5.0;
  /// Random sign per target; when false every offset is positive.
  bool dynamic_offset_signed = true;
  /// Ghosts look static but carry this fixed Doppler bias.
  double ghost_bias = 2.0;
  double doppler_noise_sigma = 0.0;
  DirectionModel directions = DirectionModel::FullSphere;
  double cone_half_angle = 1.0;  // rad, around +x; ForwardCone only
  double range_min = 1.0;
  double range_max = 50.0;
  double snr_min = 5.0;
  double snr_max = 30.0;
  std::uint64_t seed = 1;
  /// Interleave static/dynamic/ghost returns instead of emitting them in blocks.
  bool shuffle = true;
};

struct LabeledScan {
  RadarScan scan;
  InlierMask labels;  // 1 = static target consistent with ego_velocity
};

/// Deterministic in spec.seed.
LabeledScan generate_scan(const SceneSpec& spec, double timestamp);

using VelocityProfile = std::function<Vec3(double)>;

VelocityProfile constant_profile(const Vec3& v);
/// mean + amplitude * sin(2 pi f t + phase), per axis.
VelocityProfile sinusoid_profile(const Vec3& mean, const Vec3& amplitude, double frequency_hz,
                                 double phase = 0.0);

struct StreamSpec {
  double rate_hz = 10.0;
  double duration = 10.0;
  double start_time = 0.0;
  /// Ticks whose static field is generated from profile(t) + wild_offset.
  std::vector<std::size_t> wild_indices;
  Vec3 wild_offset = Vec3(9.0, 0.0, 0.0);
};

struct StreamTick {
  LabeledScan labeled;
  Vec3 true_velocity;
  bool wild = false;
};

/// round(duration * rate) ticks; tick k uses seed base.seed + k.
std::vector<StreamTick> generate_trajectory_stream(const VelocityProfile& profile,
                                                   const StreamSpec& stream, const SceneSpec& base);

}  // namespace radvel::synth
