#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace radvel::kernels {

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "scalar";
}

const KernelTable& scalar_table() noexcept { return detail::scalar_kernels(); }

const KernelTable* avx2_table() noexcept {
#if defined(RADVEL_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::avx2_kernels() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() noexcept {
#if defined(RADVEL_HAVE_NEON)
  return &detail::neon_kernels();  // NEON is mandatory on AArch64
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* table_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return &scalar_table();
    case Isa::Avx2: return avx2_table();
    case Isa::Neon: return neon_table();
  }
  return nullptr;
}

const KernelTable* detect() noexcept {
  if (const char* env = std::getenv("RADVEL_KERNELS")) {
    const std::string_view want(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (want == to_string(isa)) {
        if (const KernelTable* t = table_for(isa)) return t;
      }
    }
  }
  if (const KernelTable* t = avx2_table()) return t;
  if (const KernelTable* t = neon_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> current{detect()};
  return current;
}

}  // namespace

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

Isa force_isa(Isa isa) noexcept {
  const KernelTable* t = table_for(isa);
  if (t == nullptr) t = &scalar_table();
  slot().store(t, std::memory_order_release);
  return t->isa;
}

DirectionBlock::DirectionBlock(const RadarScan& scan, std::span<const std::uint8_t> mask) {
  const std::size_t n = scan.size();
  ux.reserve(n);
  uy.reserve(n);
  uz.reserve(n);
  doppler.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask.empty() && mask[i] == 0) continue;
    const Detection& d = scan.detections[i];
    push_back(direction_of(d), d.doppler);
  }
}

void DirectionBlock::push_back(const UnitDirection& u, double doppler_value) {
  ux.push_back(u.x());
  uy.push_back(u.y());
  uz.push_back(u.z());
  doppler.push_back(doppler_value);
}

void residuals(const DirectionView& b, const Vec3& v, std::span<double> out) {
  active().residuals(b, v.data(), out.data());
}

std::size_t gate_inliers(const DirectionView& b, const Vec3& v, double threshold,
                         std::span<std::uint8_t> mask) {
  return active().gate_inliers(b, v.data(), threshold, mask.data());
}

Vec3 weighted_direction_sum(const DirectionView& b, std::span<const double> coeff) {
  Vec3 out;
  active().weighted_direction_sum(b, coeff.data(), out.data());
  return out;
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

}  // namespace radvel::kernels
