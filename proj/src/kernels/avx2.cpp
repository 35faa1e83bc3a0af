// AVX2 kernels, 4 doubles per lane group. This file is compiled with -mavx2
// but without -mfma so the element-wise results match scalar.cpp bit for bit.

#include <immintrin.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace radvel::kernels::detail {
namespace {

inline double residual_tail(const DirectionView& b, const double* v, std::size_t i) {
  double r = b.doppler[i] + b.ux[i] * v[0];
  r = r + b.uy[i] * v[1];
  return r + b.uz[i] * v[2];
}

inline __m256d residual4(const DirectionView& b, __m256d vx, __m256d vy, __m256d vz,
                         std::size_t i) {
  __m256d r = _mm256_add_pd(_mm256_loadu_pd(&b.doppler[i]),
                            _mm256_mul_pd(_mm256_loadu_pd(&b.ux[i]), vx));
  r = _mm256_add_pd(r, _mm256_mul_pd(_mm256_loadu_pd(&b.uy[i]), vy));
  return _mm256_add_pd(r, _mm256_mul_pd(_mm256_loadu_pd(&b.uz[i]), vz));
}

inline double hsum(__m256d x) {
  const __m128d lo = _mm256_castpd256_pd128(x);
  const __m128d hi = _mm256_extractf128_pd(x, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void residuals_avx2(const DirectionView& b, const double* v, double* out) {
  const std::size_t n = b.size();
  const __m256d vx = _mm256_set1_pd(v[0]);
  const __m256d vy = _mm256_set1_pd(v[1]);
  const __m256d vz = _mm256_set1_pd(v[2]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, residual4(b, vx, vy, vz, i));
  for (; i < n; ++i) out[i] = residual_tail(b, v, i);
}

std::size_t gate_inliers_avx2(const DirectionView& b, const double* v, double threshold,
                              std::uint8_t* mask) {
  const std::size_t n = b.size();
  const __m256d vx = _mm256_set1_pd(v[0]);
  const __m256d vy = _mm256_set1_pd(v[1]);
  const __m256d vz = _mm256_set1_pd(v[2]);
  const __m256d thr = _mm256_set1_pd(threshold);
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_andnot_pd(sign, residual4(b, vx, vy, vz, i));
    const int bits = _mm256_movemask_pd(_mm256_cmp_pd(r, thr, _CMP_LT_OQ));
    for (int lane = 0; lane < 4; ++lane) mask[i + lane] = static_cast<std::uint8_t>((bits >> lane) & 1);
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(bits)));
  }
  for (; i < n; ++i) {
    const bool inlier = std::fabs(residual_tail(b, v, i)) < threshold;
    mask[i] = inlier ? 1 : 0;
    count += inlier ? 1 : 0;
  }
  return count;
}

void weighted_direction_sum_avx2(const DirectionView& b, const double* coeff, double* out) {
  const std::size_t n = b.size();
  __m256d sx = _mm256_setzero_pd();
  __m256d sy = _mm256_setzero_pd();
  __m256d sz = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d c = _mm256_loadu_pd(coeff + i);
    sx = _mm256_add_pd(sx, _mm256_mul_pd(c, _mm256_loadu_pd(&b.ux[i])));
    sy = _mm256_add_pd(sy, _mm256_mul_pd(c, _mm256_loadu_pd(&b.uy[i])));
    sz = _mm256_add_pd(sz, _mm256_mul_pd(c, _mm256_loadu_pd(&b.uz[i])));
  }
  double tx = hsum(sx), ty = hsum(sy), tz = hsum(sz);
  for (; i < n; ++i) {
    tx += coeff[i] * b.ux[i];
    ty += coeff[i] * b.uy[i];
    tz += coeff[i] * b.uz[i];
  }
  out[0] = tx;
  out[1] = ty;
  out[2] = tz;
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

}  // namespace

const KernelTable& avx2_kernels() noexcept {
  static const KernelTable table{Isa::Avx2, residuals_avx2, gate_inliers_avx2,
                                 weighted_direction_sum_avx2, sum_avx2};
  return table;
}

}  // namespace radvel::kernels::detail
