#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "radvel/pipeline.hpp"
#include "radvel/synth.hpp"
#include "scenarios.hpp"

using namespace radvel;

namespace {

bool same_bits(const VelocityEstimate& a, const VelocityEstimate& b) {
  return std::memcmp(a.velocity.data(), b.velocity.data(), sizeof(double) * 3) == 0 && a.status == b.status &&
         a.timestamp == b.timestamp && a.inlier_count == b.inlier_count && a.total_count == b.total_count &&
         std::memcmp(&a.residual_rms, &b.residual_rms, sizeof(double)) == 0;
}

RadarScan moving_scan(std::uint64_t seed, const Vec3& v, double t, int n_dynamic = 0, double sigma = 0.0) {
  synth::SceneSpec spec;
  spec.n_static = 60;
  spec.n_dynamic = n_dynamic;
  spec.ego_velocity = v;
  spec.doppler_noise_sigma = sigma;
  spec.seed = seed;
  return synth::generate_scan(spec, t).scan;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("stationary scan") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> small(-0.009, 0.009);
  RadarScan s = moving_scan(1, Vec3::Zero(), 0.0);
  for (auto& d : s.detections) d.doppler = small(rng);
  VelocityEstimator est{EstimatorConfig{}};
  const auto e = est.process_scan(s);
  CHECK(e.status == EstimateStatus::ZeroVelocity);
  CHECK(e.velocity == Vec3::Zero());
  CHECK(est.filter_state().window.size() == 1);
  REQUIRE(est.last_accepted().has_value());
  CHECK(*est.last_accepted() == Vec3::Zero());
}

TEST_CASE("clean moving scan, ransac + L2") {
  const Vec3 v(4.0, -1.0, 0.25);
  VelocityEstimator est{EstimatorConfig{}};
  const auto e = est.process_scan(moving_scan(2, v, 0.0));
  CHECK(e.status == EstimateStatus::Estimated);
  CHECK(testutil::max_abs_diff(e.velocity, v) < 1e-9);
  CHECK(e.inlier_count == 60);
  CHECK(e.total_count == 60);
  CHECK(e.residual_rms < 1e-12);
}

TEST_CASE("norm jump from a stable window is rejected") {
  VelocityEstimator est{EstimatorConfig{}};
  const Vec3 v(2, 0, 0);
  for (int k = 0; k < 6; ++k) CHECK(est.process_scan(moving_scan(10 + k, v, 0.1 * k)).status == EstimateStatus::Estimated);
  const auto window = est.filter_state();
  const auto e = est.process_scan(moving_scan(30, Vec3(11, 0, 0), 0.6));
  CHECK(e.status == EstimateStatus::Rejected);
  CHECK(testutil::max_abs_diff(e.velocity, Vec3(11, 0, 0)) < 1e-9);
  CHECK(est.filter_state() == window);
  CHECK(testutil::max_abs_diff(*est.last_accepted(), v) < 1e-9);
}

TEST_CASE("sequence basics") {
  CHECK(process_sequence(EstimatorConfig{}, {}).empty());
  std::vector<RadarScan> scans;
  for (int k = 0; k < 20; ++k) scans.push_back(moving_scan(100 + k, Vec3(1.0 + 0.01 * k, 0.5, 0), 0.1 * k, 15, 0.05));
  const auto a = process_sequence(EstimatorConfig{}, scans);
  const auto b = process_sequence(EstimatorConfig{}, scans);
  REQUIRE(a.size() == scans.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].timestamp == scans[i].timestamp);
    CHECK(same_bits(a[i], b[i]));
  }
}

TEST_CASE("789-scan stream with three wild scans") {
  const auto ticks = testutil::wild_stream();
  REQUIRE(ticks.size() == 789);
  const auto scans = testutil::scans_of(ticks);
  const auto out = process_sequence(EstimatorConfig{}, scans);
  std::vector<std::size_t> rejected;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].status == EstimateStatus::Rejected) rejected.push_back(i);
    CHECK(out[i].status != EstimateStatus::Degenerate);
  }
  CHECK(rejected == testutil::wild_ticks());
  const auto again = process_sequence(EstimatorConfig{}, scans);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(same_bits(out[i], again[i]));
}

TEST_CASE("disabling the filter on an outlier-free stream changes nothing") {
  synth::SceneSpec scene;
  scene.n_static = 50;
  scene.n_dynamic = 10;
  scene.doppler_noise_sigma = 0.05;
  synth::StreamSpec stream;
  stream.duration = 10.0;
  for (auto loss : {LossSpec::l2(), LossSpec::cauchy()}) {
    EstimatorConfig on, off;
    on.loss = off.loss = loss;
    off.filter_enabled = false;
    const auto scans = testutil::scans_of(synth::generate_trajectory_stream(testutil::drive_profile(), stream, scene));
    const auto a = process_sequence(on, scans);
    const auto b = process_sequence(off, scans);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_bits(a[i], b[i]));
  }
}

TEST_CASE("unified step: no rejector, cauchy loss") {
  EstimatorConfig cfg;
  cfg.rejector.method = RejectorMethod::None;
  cfg.loss = LossSpec::cauchy();
  cfg.filter_enabled = false;
  std::mt19937_64 rng(3);
  VelocityEstimator est(cfg);
  for (int k = 0; k < 100; ++k) {
    const Vec3 v = testutil::random_velocity(rng, 10.0);
    const auto e = est.process_scan(moving_scan(500 + static_cast<std::uint64_t>(k), v, 0.1 * k, 10, 0.05));
    CHECK(e.status == EstimateStatus::Estimated);
    CHECK(all_finite(e.velocity));
  }
}

TEST_CASE("degenerate scans do not stop the stream") {
  VelocityEstimator est{EstimatorConfig{}};
  RadarScan two;
  two.timestamp = 0.0;
  two.detections = {{Vec3(1, 0, 0), -1.0}, {Vec3(0, 1, 0), 0.5}};
  auto e = est.process_scan(two);
  CHECK(e.status == EstimateStatus::Degenerate);
  CHECK(std::isnan(e.velocity.x()));
  CHECK(e.total_count == 2);
  CHECK_FALSE(est.diagnostics().failure.empty());

  RadarScan planar;
  planar.timestamp = 0.1;
  for (int i = 0; i < 12; ++i) {
    const double a = 0.5 * i;
    planar.detections.push_back({Vec3(std::cos(a), std::sin(a), 0) * 10.0, -2.0 * std::cos(a) - std::sin(a)});
  }
  CHECK(est.process_scan(planar).status == EstimateStatus::Degenerate);

  RadarScan origin = moving_scan(7, Vec3(1, 0, 0), 0.2);
  origin.detections[4].position = Vec3::Zero();
  CHECK(est.process_scan(origin).status == EstimateStatus::Degenerate);

  CHECK(est.process_scan(moving_scan(8, Vec3(1, 0, 0), 0.3)).status == EstimateStatus::Estimated);
  CHECK(est.filter_state().window.size() == 1);
}

TEST_CASE("gnc above the recommended size warns") {
  EstimatorConfig cfg;
  cfg.rejector.method = RejectorMethod::Gnc;
  VelocityEstimator est(cfg);
  synth::SceneSpec spec;
  spec.n_static = 120;
  spec.n_dynamic = 30;
  spec.ego_velocity = Vec3(3, 1, 0);
  spec.doppler_noise_sigma = 0.02;
  const auto e = est.process_scan(synth::generate_scan(spec, 0.0).scan);
  CHECK(e.status == EstimateStatus::Estimated);
  CHECK(testutil::max_abs_diff(e.velocity, spec.ego_velocity) < 0.05);
  REQUIRE_FALSE(est.diagnostics().warnings.empty());
  CHECK(est.diagnostics().warnings.front().find("recommended") != std::string::npos);
}

TEST_CASE("every rejector and loss recovers clean data") {
  const Vec3 v(-2.0, 3.0, 0.5);
  for (auto method : {RejectorMethod::Ransac, RejectorMethod::Mlesac, RejectorMethod::Gnc, RejectorMethod::None}) {
    for (auto loss : {LossSpec::l2(), LossSpec::l2(true), LossSpec::truncated_l2(), LossSpec::huber(),
                      LossSpec::cauchy(), LossSpec::geman_mcclure(), LossSpec::l1_l2(), LossSpec::welsch()}) {
      EstimatorConfig cfg;
      cfg.rejector.method = method;
      cfg.loss = loss;
      VelocityEstimator est(cfg);
      const auto e = est.process_scan(moving_scan(77, v, 0.0));
      CAPTURE(to_string(method));
      CAPTURE(to_string(loss.kind));
      CHECK(e.status == EstimateStatus::Estimated);
      CHECK(testutil::max_abs_diff(e.velocity, v) < 1e-6);
    }
  }
}

TEST_CASE("invalid configuration is refused up front") {
  EstimatorConfig cfg;
  cfg.loss.scale = -1.0;
  cfg.loss.kind = LossKind::Cauchy;
  CHECK_THROWS_AS(VelocityEstimator{cfg}, Error);
}

}
