#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "radvel/types.hpp"

namespace testutil {

using radvel::Detection;
using radvel::RadarScan;
using radvel::Vec3;

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-3);
  return v.normalized();
}

inline Vec3 random_velocity(std::mt19937_64& rng, double max_norm) {
  std::uniform_real_distribution<double> r(0.0, max_norm);
  return random_unit(rng) * r(rng);
}

// Static target along `p`: -doppler = u . v, computed independently of the library.
inline Detection static_detection(const Vec3& p, const Vec3& v, double noise = 0.0) {
  Detection d;
  d.position = p;
  d.doppler = -p.dot(v) / p.norm() + noise;
  return d;
}

inline RadarScan static_scan(std::mt19937_64& rng, int n, const Vec3& v, double sigma = 0.0) {
  std::uniform_real_distribution<double> range(1.0, 40.0);
  std::uniform_real_distribution<double> snr(1.0, 30.0);
  std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);
  RadarScan s;
  for (int i = 0; i < n; ++i) {
    Detection d = static_detection(random_unit(rng) * range(rng), v, sigma > 0.0 ? noise(rng) : 0.0);
    d.snr = snr(rng);
    s.detections.push_back(d);
  }
  return s;
}

// Normal equations (sum w u u^T) v = -sum w d u solved with Cramer's rule.
inline Vec3 normal_equations_oracle(const RadarScan& s, const std::vector<double>& w) {
  double a[3][3] = {};
  double b[3] = {};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3 u = s.detections[i].position / s.detections[i].position.norm();
    const double wi = w.empty() ? 1.0 : w[i];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += wi * u[r] * u[c];
      b[r] -= wi * s.detections[i].doppler * u[r];
    }
  }
  auto det3 = [](double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double d = det3(a);
  Vec3 x;
  for (int k = 0; k < 3; ++k) {
    double m[3][3];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m[r][c] = c == k ? b[r] : a[r][c];
    x[k] = det3(m) / d;
  }
  return x;
}

inline double max_abs_diff(const Vec3& a, const Vec3& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace testutil
