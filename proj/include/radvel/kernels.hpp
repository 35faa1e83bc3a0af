#pragma once

// Data-parallel inner loops shared by the rejectors and the optimizer.
//
// Each kernel has a scalar reference implementation and vectorized variants
// (AVX2 on x86-64, NEON on AArch64). The variant is picked once at runtime
// from the CPU feature set and can be overridden with RADVEL_KERNELS=scalar
// or force_isa(). Element-wise kernels (residuals, inlier gating) are
// bit-identical across variants; reductions agree to rounding.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "radvel/types.hpp"

namespace radvel::kernels {

/// Structure-of-arrays view over unit directions and Doppler values.
struct DirectionView {
  std::span<const double> ux;
  std::span<const double> uy;
  std::span<const double> uz;
  std::span<const double> doppler;

  std::size_t size() const noexcept { return doppler.size(); }
};

/// Owning storage behind a DirectionView.
struct DirectionBlock {
  std::vector<double> ux, uy, uz, doppler;

  DirectionBlock() = default;
  /// Selects detections whose mask entry is nonzero (all when mask is empty).
  /// Throws Errc::ZeroRangeDetection on a detection at the origin.
  explicit DirectionBlock(const RadarScan& scan, std::span<const std::uint8_t> mask = {});

  void push_back(const UnitDirection& u, double doppler_value);
  std::size_t size() const noexcept { return doppler.size(); }
  DirectionView view() const noexcept { return {ux, uy, uz, doppler}; }
};

enum class Isa : std::uint8_t { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

/// Function table for one instruction set.
struct KernelTable {
  Isa isa;
  /// out[i] = doppler[i] + u[i] . v
  void (*residuals)(const DirectionView& b, const double* v, double* out);
  /// mask[i] = |doppler[i] + u[i] . v| < threshold; returns the count.
  std::size_t (*gate_inliers)(const DirectionView& b, const double* v, double threshold,
                              std::uint8_t* mask);
  /// out = sum_i coeff[i] * u[i]
  void (*weighted_direction_sum)(const DirectionView& b, const double* coeff, double* out);
  /// sum_i x[i]
  double (*sum)(const double* x, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

/// The table selected for this process.
const KernelTable& active() noexcept;
/// Overrides the selection; falls back to scalar when `isa` is unavailable.
/// Returns the ISA actually in effect.
Isa force_isa(Isa isa) noexcept;

// Convenience wrappers over active().
void residuals(const DirectionView& b, const Vec3& v, std::span<double> out);
std::size_t gate_inliers(const DirectionView& b, const Vec3& v, double threshold,
                         std::span<std::uint8_t> mask);
Vec3 weighted_direction_sum(const DirectionView& b, std::span<const double> coeff);
double sum(std::span<const double> x);

}  // namespace radvel::kernels
