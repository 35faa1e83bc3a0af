// Reference kernels. The vector variants must reproduce the element-wise
// results here exactly, so the evaluation order below is part of the
// contract: r = ((doppler + ux*vx) + uy*vy) + uz*vz, no fused multiply-add.

#include <cmath>

#include "kernels_internal.hpp"

namespace radvel::kernels::detail {
namespace {

void residuals_scalar(const DirectionView& b, const double* v, double* out) {
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n; ++i) {
    double r = b.doppler[i] + b.ux[i] * v[0];
    r = r + b.uy[i] * v[1];
    r = r + b.uz[i] * v[2];
    out[i] = r;
  }
}

std::size_t gate_inliers_scalar(const DirectionView& b, const double* v, double threshold,
                                std::uint8_t* mask) {
  const std::size_t n = b.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = b.doppler[i] + b.ux[i] * v[0];
    r = r + b.uy[i] * v[1];
    r = r + b.uz[i] * v[2];
    const bool inlier = std::fabs(r) < threshold;
    mask[i] = inlier ? 1 : 0;
    count += inlier ? 1 : 0;
  }
  return count;
}

void weighted_direction_sum_scalar(const DirectionView& b, const double* coeff, double* out) {
  double sx = 0.0, sy = 0.0, sz = 0.0;
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n; ++i) {
    sx += coeff[i] * b.ux[i];
    sy += coeff[i] * b.uy[i];
    sz += coeff[i] * b.uz[i];
  }
  out[0] = sx;
  out[1] = sy;
  out[2] = sz;
}

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{Isa::Scalar, residuals_scalar, gate_inliers_scalar,
                                 weighted_direction_sum_scalar, sum_scalar};
  return table;
}

}  // namespace radvel::kernels::detail
