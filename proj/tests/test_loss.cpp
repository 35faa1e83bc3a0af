#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "radvel/loss.hpp"

using namespace radvel;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<LossSpec> all_kernels(double c) {
  std::vector<LossSpec> out{LossSpec::l2(), LossSpec::truncated_l2(c), LossSpec::huber(c), LossSpec::cauchy(c)};
  for (double a : {-kInf, -2.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.5}) out.push_back(LossSpec::barron(a, c));
  return out;
}

// Central difference with a step proportional to |x|.
double fd(const LossSpec& s, double x) {
  const double h = 1e-5 * std::abs(x);
  return (eval(s, x + h) - eval(s, x - h)) / (2.0 * h);
}

std::vector<double> abscissae() {
  std::vector<double> xs;
  for (double e = -3.0; e <= 1.0; e += 0.125) xs.push_back(std::pow(10.0, e));
  return xs;
}

bool near_kink(const LossSpec& s, double x) {
  const double k = s.kind == LossKind::TruncatedL2 ? s.truncation : s.kind == LossKind::Huber ? s.scale : -1.0;
  return k > 0 && std::abs(std::abs(x) - k) < 1e-3 * k;
}

}  // namespace

TEST_SUITE("loss") {

TEST_CASE("closed-form values") {
  CHECK(eval(LossSpec::barron(1.0, 1.0), 1.0) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
  CHECK(eval_grad(LossSpec::barron(1.0, 1.0), 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(eval(LossSpec::barron(2.0, 1.0), 0.7) == doctest::Approx(0.245).epsilon(1e-14));
  CHECK(std::abs(eval(LossSpec::barron(2.0 + 1e-6, 1.0), 0.7) - 0.245) < 1e-5);
  CHECK(std::abs(eval(LossSpec::barron(2.0 - 1e-6, 1.0), 0.7) - 0.245) < 1e-5);
  CHECK(eval(LossSpec::barron(0.0, 2.0), 2.0) == doctest::Approx(std::log(1.5)));
  CHECK(eval(LossSpec::welsch(1.0), 1.0) == doctest::Approx(1.0 - std::exp(-0.5)));
  CHECK(eval(LossSpec::l2(), 3.0, 2.0) == doctest::Approx(9.0));
  CHECK(eval(LossSpec::huber(1.0), 3.0) == doctest::Approx(2.5));
  CHECK(eval(LossSpec::cauchy(1.0), 1.0) == doctest::Approx(0.5 * std::log(2.0)));
}

TEST_CASE("every kernel vanishes at zero") {
  for (double a : {-kInf, -2.0, -0.5, 0.0, 0.5, 1.0, 2.0, 7.0}) {
    CHECK(eval(LossSpec::barron(a, 1.0), 0.0) == 0.0);
  }
  for (const auto& s : all_kernels(0.3)) {
    CHECK(eval(s, 0.0) == 0.0);
    CHECK(eval_grad(s, 0.0) == 0.0);
  }
  CHECK(eval_grad(LossSpec::l2(), 0.0) == 0.0);
}

TEST_CASE("truncated plateau") {
  const auto s = LossSpec::truncated_l2(1.0);
  CHECK(eval(s, 5.0) == eval(s, 1.0));
  CHECK(eval(s, 5.0) == 0.5);
  CHECK(eval_grad(s, 5.0) == 0.0);
  CHECK(eval_grad(s, 1.0) == 0.0);
  CHECK(eval_grad(s, -1.0) == 0.0);
  CHECK(eval_grad(s, 0.5) == 0.5);
}

TEST_CASE("huber linear regime") {
  const auto s = LossSpec::huber(1.0);
  CHECK(eval_grad(s, 10.0) == 1.0);
  CHECK(eval_grad(s, -10.0) == -1.0);
  CHECK(eval_grad(s, 10.0, 0.5) == 0.5);
}

TEST_CASE("even, nonnegative, nondecreasing in |x|") {
  for (double c : {0.1, 1.0, 5.0}) {
    for (const auto& s : all_kernels(c)) {
      double prev = 0.0;
      for (double x = 0.0; x <= 20.0; x += 0.01) {
        const double f = eval(s, x);
        CHECK(f == eval(s, -x));
        CHECK(f >= 0.0);
        CHECK(f >= prev);
        CHECK(eval_grad(s, -x) == -eval_grad(s, x));
        prev = f;
      }
    }
  }
}

TEST_CASE("analytic gradient against central differences") {
  for (double c : {0.1, 1.0, 5.0}) {
    for (const auto& s : all_kernels(c)) {
      for (double x : abscissae()) {
        for (double sx : {x, -x}) {
          if (near_kink(s, sx)) continue;
          // Beyond ~5c the Welsch gradient drops below what a difference quotient of an O(1) value resolves.
          if (std::isinf(s.alpha) && std::abs(sx) > 5.0 * c) continue;
          const double g = eval_grad(s, sx);
          const double n = fd(s, sx);
          CAPTURE(to_string(s.kind));
          CAPTURE(s.alpha);
          CAPTURE(c);
          CAPTURE(sx);
          // Redescending kernels have gradients far below the value scale in the tails.
          CHECK(std::abs(g - n) <= 1e-6 * std::max(std::abs(g), 1e-12));
        }
      }
    }
  }
}

TEST_CASE("barron special cases are continuous") {
  for (double c : {1.0}) {
    for (int i = 0; i < 1000; ++i) {
      const double x = -10.0 + 20.0 * i / 999.0;
      const double q = eval(LossSpec::barron(2.0, c), x);
      const double l = eval(LossSpec::barron(0.0, c), x);
      CHECK(q == (x / c) * (x / c) / 2.0);
      CHECK(l == doctest::Approx(std::log((x / c) * (x / c) / 2.0 + 1.0)).epsilon(1e-14));
      for (double d : {1e-6, -1e-6}) {
        CHECK(std::abs(eval(LossSpec::barron(2.0 + d, c), x) - q) < 1e-5 * std::max(1.0, q));
        CHECK(std::abs(eval(LossSpec::barron(d, c), x) - l) < 1e-5 * std::max(1.0, l));
      }
    }
  }
}

TEST_CASE("barron is nondecreasing in alpha") {
  for (double c : {0.1, 1.0, 5.0}) {
    for (double x : {-7.0, -0.3, 0.01, 0.5, 2.0, 10.0}) {
      double prev = -1.0;
      for (int i = 0; i <= 400; ++i) {
        const double a = -2.0 + 4.0 * i / 400.0;
        const double f = eval(LossSpec::barron(a, c), x);
        CHECK(f >= prev - 1e-12 * std::abs(f));
        prev = f;
      }
    }
  }
}

TEST_CASE("cauchy is a scaled barron alpha = 0") {
  for (double c : {0.1, 0.2, 1.0, 5.0}) {
    for (double x = -10.0; x <= 10.0; x += 0.37) {
      const double barron0 = eval(LossSpec::barron(0.0, c / std::sqrt(2.0)), x);
      CHECK(eval(LossSpec::cauchy(c), x) == doctest::Approx(c * c / 2.0 * barron0).epsilon(1e-13));
    }
  }
}

TEST_CASE("named aliases") {
  CHECK(LossSpec::geman_mcclure().alpha == -2.0);
  CHECK(LossSpec::l1_l2().alpha == 1.0);
  CHECK(LossSpec::welsch().alpha == -kInf);
  // L2 through the general family: alpha = 2 with c = 1.
  for (double x : {-3.0, 0.2, 4.0}) CHECK(eval(LossSpec::barron(2.0, 1.0), x) == eval(LossSpec::l2(), x));
}

TEST_CASE("irls weight is rho'(x)/x") {
  for (const auto& s : all_kernels(0.7)) {
    for (double x : {0.05, 0.4, 3.0}) {
      if (near_kink(s, x)) continue;
      CHECK(irls_weight(s, x) == doctest::Approx(eval_grad(s, x) / x).epsilon(1e-12));
    }
    CHECK(std::isfinite(irls_weight(s, 0.0)));
  }
}

TEST_CASE("validation") {
  auto bad = LossSpec::cauchy(0.0);
  CHECK_THROWS_AS(validate(bad), Error);
  CHECK_THROWS_AS(eval(bad, 1.0), Error);
  bad = LossSpec::truncated_l2(-1.0);
  CHECK_THROWS_AS(validate(bad), Error);
  bad = LossSpec::barron(std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(validate(bad), Error);
  CHECK_NOTHROW(validate(LossSpec::welsch()));
}

TEST_CASE("snr weights") {
  RadarScan s;
  s.detections = {{Vec3(1, 0, 0), 0.0, 10.0}, {Vec3(0, 1, 0), 0.0, 20.0}};
  CHECK(scan_weights(s, LossSpec::l2()) == std::vector<double>{1.0, 1.0});
  CHECK(scan_weights(s, LossSpec::l2(true)) == std::vector<double>{0.5, 1.0});
  s.detections[0].snr = s.detections[1].snr = 0.0;
  CHECK(scan_weights(s, LossSpec::l2(true)) == std::vector<double>{1.0, 1.0});
  CHECK(weight_of(s.detections[0], LossSpec::cauchy(), 20.0) == 1.0);
}

}
