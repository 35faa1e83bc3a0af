#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "radvel/kernels.hpp"

using namespace radvel;
using namespace radvel::kernels;

namespace {

DirectionBlock random_block(std::mt19937_64& rng, std::size_t n) {
  DirectionBlock b;
  std::normal_distribution<double> d(0.0, 3.0);
  for (std::size_t i = 0; i < n; ++i) b.push_back(UnitDirection::from_vector(testutil::random_unit(rng)), d(rng));
  return b;
}

std::vector<const KernelTable*> vector_tables() {
  std::vector<const KernelTable*> t;
  if (avx2_table()) t.push_back(avx2_table());
  if (neon_table()) t.push_back(neon_table());
  return t;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar kernels against direct loops") {
  std::mt19937_64 rng(1);
  const DirectionBlock b = random_block(rng, 37);
  const Vec3 v(1.5, -0.25, 2.0);
  std::vector<double> r(b.size());
  scalar_table().residuals(b.view(), v.data(), r.data());
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(r[i] == doctest::Approx(b.doppler[i] + b.ux[i] * v.x() + b.uy[i] * v.y() + b.uz[i] * v.z()));
  }
  std::vector<std::uint8_t> mask(b.size());
  const std::size_t n = scalar_table().gate_inliers(b.view(), v.data(), 1.0, mask.data());
  std::size_t expect = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(mask[i] == (std::abs(r[i]) < 1.0));
    expect += std::abs(r[i]) < 1.0;
  }
  CHECK(n == expect);
  std::vector<double> c(b.size(), 2.0);
  double out[3];
  scalar_table().weighted_direction_sum(b.view(), c.data(), out);
  double sx = 0;
  for (std::size_t i = 0; i < b.size(); ++i) sx += 2.0 * b.ux[i];
  CHECK(out[0] == doctest::Approx(sx));
  CHECK(scalar_table().sum(c.data(), c.size()) == doctest::Approx(74.0));
}

TEST_CASE("vector variants match the scalar reference") {
  const auto tables = vector_tables();
  if (tables.empty()) {
    MESSAGE("no vector kernels on this CPU; equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(2);
  for (const KernelTable* t : tables) {
    CAPTURE(to_string(t->isa));
    // Sizes straddle the vector width so remainder loops are covered.
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 64u, 101u, 1000u}) {
      const DirectionBlock b = random_block(rng, n);
      const Vec3 v = testutil::random_velocity(rng, 10.0);
      std::vector<double> rs(n), rv(n);
      scalar_table().residuals(b.view(), v.data(), rs.data());
      t->residuals(b.view(), v.data(), rv.data());
      CHECK(bit_equal(rs, rv));

      std::vector<std::uint8_t> ms(n), mv(n);
      const auto cs = scalar_table().gate_inliers(b.view(), v.data(), 0.75, ms.data());
      const auto cv = t->gate_inliers(b.view(), v.data(), 0.75, mv.data());
      CHECK(cs == cv);
      CHECK(ms == mv);

      std::vector<double> coeff(n);
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      for (auto& c : coeff) c = u(rng);
      double os[3], ov[3];
      scalar_table().weighted_direction_sum(b.view(), coeff.data(), os);
      t->weighted_direction_sum(b.view(), coeff.data(), ov);
      double scale = 1.0;
      for (double c : coeff) scale += std::abs(c);
      for (int k = 0; k < 3; ++k) CHECK(std::abs(os[k] - ov[k]) <= 1e-13 * scale);
      CHECK(std::abs(scalar_table().sum(coeff.data(), n) - t->sum(coeff.data(), n)) <= 1e-13 * scale);
    }
  }
}

TEST_CASE("gate threshold is strict") {
  DirectionBlock b;
  b.push_back(UnitDirection::from_vector({1, 0, 0}), 0.5);
  b.push_back(UnitDirection::from_vector({1, 0, 0}), -0.5);
  b.push_back(UnitDirection::from_vector({1, 0, 0}), 0.25);
  b.push_back(UnitDirection::from_vector({1, 0, 0}), 0.75);
  b.push_back(UnitDirection::from_vector({1, 0, 0}), 0.0);
  const double v[3] = {0, 0, 0};
  std::vector<const KernelTable*> all{&scalar_table()};
  for (auto* t : vector_tables()) all.push_back(t);
  for (const KernelTable* t : all) {
    std::vector<std::uint8_t> m(b.size());
    CHECK(t->gate_inliers(b.view(), v, 0.5, m.data()) == 2);
    CHECK(m == std::vector<std::uint8_t>{0, 0, 1, 0, 1});
  }
}

TEST_CASE("force_isa and the active table") {
  const Isa before = active().isa;
  CHECK(force_isa(Isa::Scalar) == Isa::Scalar);
  CHECK(active().isa == Isa::Scalar);
  const Isa got = force_isa(Isa::Avx2);
  CHECK(got == (avx2_table() ? Isa::Avx2 : Isa::Scalar));
  force_isa(before);
  CHECK(active().isa == before);
}

TEST_CASE("DirectionBlock honours the mask") {
  RadarScan s;
  s.detections = {{Vec3(2, 0, 0), 1.0}, {Vec3(0, 3, 0), 2.0}, {Vec3(0, 0, 4), 3.0}};
  const std::vector<std::uint8_t> mask{1, 0, 1};
  DirectionBlock b(s, mask);
  REQUIRE(b.size() == 2);
  CHECK(b.ux[0] == 1.0);
  CHECK(b.uz[1] == 1.0);
  CHECK(b.doppler[1] == 3.0);
  s.detections.push_back({Vec3::Zero(), 0.0});
  CHECK_THROWS_AS(DirectionBlock{s}, Error);
}

}
