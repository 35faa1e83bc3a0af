// NEON kernels for AArch64, 2 doubles per register. Built with
// -ffp-contract=off so vmul/vadd are not fused and results match scalar.cpp.

#include <arm_neon.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace radvel::kernels::detail {
namespace {

inline double residual_tail(const DirectionView& b, const double* v, std::size_t i) {
  double r = b.doppler[i] + b.ux[i] * v[0];
  r = r + b.uy[i] * v[1];
  return r + b.uz[i] * v[2];
}

inline float64x2_t residual2(const DirectionView& b, float64x2_t vx, float64x2_t vy, float64x2_t vz,
                             std::size_t i) {
  float64x2_t r = vaddq_f64(vld1q_f64(&b.doppler[i]), vmulq_f64(vld1q_f64(&b.ux[i]), vx));
  r = vaddq_f64(r, vmulq_f64(vld1q_f64(&b.uy[i]), vy));
  return vaddq_f64(r, vmulq_f64(vld1q_f64(&b.uz[i]), vz));
}

void residuals_neon(const DirectionView& b, const double* v, double* out) {
  const std::size_t n = b.size();
  const float64x2_t vx = vdupq_n_f64(v[0]);
  const float64x2_t vy = vdupq_n_f64(v[1]);
  const float64x2_t vz = vdupq_n_f64(v[2]);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, residual2(b, vx, vy, vz, i));
  for (; i < n; ++i) out[i] = residual_tail(b, v, i);
}

std::size_t gate_inliers_neon(const DirectionView& b, const double* v, double threshold,
                              std::uint8_t* mask) {
  const std::size_t n = b.size();
  const float64x2_t vx = vdupq_n_f64(v[0]);
  const float64x2_t vy = vdupq_n_f64(v[1]);
  const float64x2_t vz = vdupq_n_f64(v[2]);
  const float64x2_t thr = vdupq_n_f64(threshold);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t lt = vcltq_f64(vabsq_f64(residual2(b, vx, vy, vz, i)), thr);
    const auto m0 = static_cast<std::uint8_t>(vgetq_lane_u64(lt, 0) & 1U);
    const auto m1 = static_cast<std::uint8_t>(vgetq_lane_u64(lt, 1) & 1U);
    mask[i] = m0;
    mask[i + 1] = m1;
    count += m0 + m1;
  }
  for (; i < n; ++i) {
    const bool inlier = std::fabs(residual_tail(b, v, i)) < threshold;
    mask[i] = inlier ? 1 : 0;
    count += inlier ? 1 : 0;
  }
  return count;
}

void weighted_direction_sum_neon(const DirectionView& b, const double* coeff, double* out) {
  const std::size_t n = b.size();
  float64x2_t sx = vdupq_n_f64(0.0);
  float64x2_t sy = vdupq_n_f64(0.0);
  float64x2_t sz = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t c = vld1q_f64(coeff + i);
    sx = vaddq_f64(sx, vmulq_f64(c, vld1q_f64(&b.ux[i])));
    sy = vaddq_f64(sy, vmulq_f64(c, vld1q_f64(&b.uy[i])));
    sz = vaddq_f64(sz, vmulq_f64(c, vld1q_f64(&b.uz[i])));
  }
  double tx = vaddvq_f64(sx), ty = vaddvq_f64(sy), tz = vaddvq_f64(sz);
  for (; i < n; ++i) {
    tx += coeff[i] * b.ux[i];
    ty += coeff[i] * b.uy[i];
    tz += coeff[i] * b.uz[i];
  }
  out[0] = tx;
  out[1] = ty;
  out[2] = tz;
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

}  // namespace

const KernelTable& neon_kernels() noexcept {
  static const KernelTable table{Isa::Neon, residuals_neon, gate_inliers_neon,
                                 weighted_direction_sum_neon, sum_neon};
  return table;
}

}  // namespace radvel::kernels::detail
