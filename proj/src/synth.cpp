#include "radvel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace radvel::synth {
namespace {

Vec3 sample_direction(const SceneSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> azimuth(0.0, 2.0 * std::numbers::pi);
  if (spec.directions == DirectionModel::ForwardCone) {
    std::uniform_real_distribution<double> cos_theta(std::cos(spec.cone_half_angle), 1.0);
    const double c = cos_theta(rng);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double phi = azimuth(rng);
    return {c, s * std::cos(phi), s * std::sin(phi)};
  }
  std::uniform_real_distribution<double> cos_theta(-1.0, 1.0);
  const double c = cos_theta(rng);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  const double phi = azimuth(rng);
  return {s * std::cos(phi), s * std::sin(phi), c};
}

enum class Kind { Static, Dynamic, Ghost };

}  // namespace

LabeledScan generate_scan(const SceneSpec& spec, double timestamp) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> range(spec.range_min, spec.range_max);
  std::uniform_real_distribution<double> snr(spec.snr_min, spec.snr_max);
  std::uniform_real_distribution<double> offset(spec.dynamic_offset_min, spec.dynamic_velocity_range);
  std::bernoulli_distribution coin(0.5);

  std::vector<Kind> kinds;
  kinds.insert(kinds.end(), static_cast<std::size_t>(std::max(0, spec.n_static)), Kind::Static);
  kinds.insert(kinds.end(), static_cast<std::size_t>(std::max(0, spec.n_dynamic)), Kind::Dynamic);
  kinds.insert(kinds.end(), static_cast<std::size_t>(std::max(0, spec.n_ghost)), Kind::Ghost);
  if (spec.shuffle) std::shuffle(kinds.begin(), kinds.end(), rng);

  LabeledScan out;
  out.scan.timestamp = timestamp;
  out.scan.detections.reserve(kinds.size());
  out.labels.reserve(kinds.size());
  for (Kind kind : kinds) {
    const Vec3 u = sample_direction(spec, rng);
    Detection d;
    d.position = range(rng) * u;
    d.snr = snr(rng);
    // Static model: -doppler = u . v
    double doppler = -u.dot(spec.ego_velocity);
    if (kind == Kind::Dynamic) {
      double radial = offset(rng);
      if (spec.dynamic_offset_signed && coin(rng)) radial = -radial;
      doppler += radial;
    } else if (kind == Kind::Ghost) {
      doppler += spec.ghost_bias;
    }
    if (spec.doppler_noise_sigma > 0.0) doppler += spec.doppler_noise_sigma * noise(rng);
    d.doppler = doppler;
    out.scan.detections.push_back(d);
    out.labels.push_back(kind == Kind::Static ? 1 : 0);
  }
  return out;
}

VelocityProfile constant_profile(const Vec3& v) {
  return [v](double) { return v; };
}

VelocityProfile sinusoid_profile(const Vec3& mean, const Vec3& amplitude, double frequency_hz,
                                 double phase) {
  return [=](double t) {
    return Vec3(mean + amplitude * std::sin(2.0 * std::numbers::pi * frequency_hz * t + phase));
  };
}

std::vector<StreamTick> generate_trajectory_stream(const VelocityProfile& profile,
                                                   const StreamSpec& stream, const SceneSpec& base) {
  const auto count = static_cast<std::size_t>(std::llround(stream.duration * stream.rate_hz));
  std::vector<StreamTick> ticks;
  ticks.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = stream.start_time + static_cast<double>(k) / stream.rate_hz;
    SceneSpec spec = base;
    spec.seed = base.seed + k;
    StreamTick tick;
    tick.true_velocity = profile(t);
    tick.wild = std::find(stream.wild_indices.begin(), stream.wild_indices.end(), k) !=
                stream.wild_indices.end();
    spec.ego_velocity = tick.wild ? Vec3(tick.true_velocity + stream.wild_offset) : tick.true_velocity;
    tick.labeled = generate_scan(spec, t);
    ticks.push_back(std::move(tick));
  }
  return ticks;
}

}  // namespace radvel::synth
