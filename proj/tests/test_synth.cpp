#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "radvel/motion_gate.hpp"
#include "radvel/optimizer.hpp"
#include "radvel/synth.hpp"

using namespace radvel;
using namespace radvel::synth;

TEST_SUITE("synth") {

TEST_CASE("static returns satisfy the Doppler model exactly") {
  SceneSpec spec;
  spec.n_static = 10;
  spec.ego_velocity = Vec3(1, 0, 0);
  const auto s = generate_scan(spec, 0.0);
  REQUIRE(s.scan.size() == 10);
  for (const auto& d : s.scan.detections) CHECK(std::abs(residual(d, spec.ego_velocity)) < 1e-15);
  for (auto l : s.labels) CHECK(l == 1);
}

TEST_CASE("dynamic-only scene") {
  SceneSpec spec;
  spec.n_static = 0;
  spec.n_dynamic = 5;
  const auto s = generate_scan(spec, 1.5);
  CHECK(s.scan.size() == 5);
  CHECK(s.scan.timestamp == 1.5);
  for (auto l : s.labels) CHECK(l == 0);
}

TEST_CASE("noise level") {
  SceneSpec spec;
  spec.n_static = 1000;
  spec.doppler_noise_sigma = 0.05;
  spec.ego_velocity = Vec3(2, -3, 1);
  spec.seed = 77;
  const auto s = generate_scan(spec, 0.0);
  double sum = 0, sq = 0;
  for (const auto& d : s.scan.detections) {
    const double r = residual(d, spec.ego_velocity);
    sum += r;
    sq += r * r;
  }
  const double n = 1000.0;
  const double sd = std::sqrt((sq - sum * sum / n) / (n - 1));
  CHECK(std::abs(sd - 0.05) < 0.005);
}

TEST_CASE("labels and outlier offsets") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    SceneSpec spec;
    spec.n_static = 30;
    spec.n_dynamic = 20;
    spec.n_ghost = 5;
    spec.seed = seed;
    spec.ego_velocity = Vec3(5, 1, -1);
    const auto s = generate_scan(spec, 0.0);
    std::size_t statics = 0;
    for (std::size_t i = 0; i < s.scan.size(); ++i) {
      const double r = std::abs(residual(s.scan.detections[i], spec.ego_velocity));
      if (s.labels[i]) {
        ++statics;
        CHECK(r < 1e-12);
      } else {
        CHECK(r >= 0.5 - 1e-12);
        CHECK(r <= 5.0 + 1e-12);
      }
    }
    CHECK(statics == 30);
  }
}

TEST_CASE("ranges, snr and cone directions") {
  SceneSpec spec;
  spec.n_static = 500;
  spec.directions = DirectionModel::ForwardCone;
  spec.cone_half_angle = 0.5;
  spec.range_min = 2.0;
  spec.range_max = 4.0;
  spec.snr_min = 3.0;
  spec.snr_max = 6.0;
  for (const auto& d : generate_scan(spec, 0.0).scan.detections) {
    const double r = d.position.norm();
    CHECK(r >= 2.0 - 1e-12);
    CHECK(r <= 4.0 + 1e-12);
    CHECK(d.snr >= 3.0);
    CHECK(d.snr <= 6.0);
    CHECK(d.position.x() / r >= std::cos(0.5) - 1e-12);
  }
}

TEST_CASE("deterministic in the seed") {
  SceneSpec spec;
  spec.n_dynamic = 30;
  spec.doppler_noise_sigma = 0.1;
  const auto a = generate_scan(spec, 0.0), b = generate_scan(spec, 0.0);
  REQUIRE(a.scan.size() == b.scan.size());
  for (std::size_t i = 0; i < a.scan.size(); ++i) {
    CHECK(a.scan.detections[i].position == b.scan.detections[i].position);
    CHECK(a.scan.detections[i].doppler == b.scan.detections[i].doppler);
  }
  CHECK(a.labels == b.labels);
  spec.seed = 2;
  CHECK(generate_scan(spec, 0.0).scan.detections[0].doppler != a.scan.detections[0].doppler);
}

TEST_CASE("stream tick count and stationary stream") {
  StreamSpec stream;
  stream.rate_hz = 10.0;
  stream.duration = 78.9;
  SceneSpec scene;
  scene.n_static = 20;
  const auto ticks = generate_trajectory_stream(constant_profile(Vec3::Zero()), stream, scene);
  CHECK(ticks.size() == 789);
  CHECK(ticks.back().labeled.scan.timestamp == doctest::Approx(78.8));
  for (const auto& t : ticks) CHECK(detect_zero_velocity(t.labeled.scan, ZeroVelocityConfig{}));
}

TEST_CASE("sinusoidal profile is reproduced by least squares") {
  StreamSpec stream;
  stream.duration = 5.0;
  SceneSpec scene;
  scene.n_static = 40;
  const auto profile = sinusoid_profile(Vec3(2, 0, 0), Vec3(1, 0.5, 0.2), 0.3, 0.1);
  for (const auto& t : generate_trajectory_stream(profile, stream, scene)) {
    const Vec3 expect = profile(t.labeled.scan.timestamp);
    CHECK(t.true_velocity == expect);
    CHECK(testutil::max_abs_diff(solve_linear_ls(t.labeled.scan, {}).velocity, expect) < 1e-9);
  }
}

TEST_CASE("round trip through least squares") {
  std::mt19937_64 rng(9);
  for (std::uint64_t k = 0; k < 200; ++k) {
    SceneSpec spec;
    spec.n_static = 20 + static_cast<int>(k % 50);
    spec.ego_velocity = testutil::random_velocity(rng, 10.0);
    spec.seed = k;
    CHECK(testutil::max_abs_diff(solve_linear_ls(generate_scan(spec, 0.0).scan, {}).velocity, spec.ego_velocity) <
          1e-9);
  }
}

TEST_CASE("wild ticks carry the offset") {
  StreamSpec stream;
  stream.duration = 2.0;
  stream.wild_indices = {3, 11};
  SceneSpec scene;
  scene.n_static = 30;
  const auto ticks = generate_trajectory_stream(constant_profile(Vec3(1, 0, 0)), stream, scene);
  for (std::size_t k = 0; k < ticks.size(); ++k) {
    const bool wild = k == 3 || k == 11;
    CHECK(ticks[k].wild == wild);
    CHECK(ticks[k].true_velocity == Vec3(1, 0, 0));
    const Vec3 seen = solve_linear_ls(ticks[k].labeled.scan, {}).velocity;
    CHECK(testutil::max_abs_diff(seen, wild ? Vec3(10, 0, 0) : Vec3(1, 0, 0)) < 1e-9);
  }
}

}
