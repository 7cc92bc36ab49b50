#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "lungcover/kernels.hpp"

namespace lungcover::kernels {

namespace {
using Index = std::ptrdiff_t;
}

std::uint8_t window_pixel(double mean, double lo, double hi) noexcept {
  const double t = std::clamp((mean - lo) / (hi - lo), 0.0, 1.0);
  return static_cast<std::uint8_t>(std::round(255.0 * t));
}

std::size_t count_set(std::span<const std::uint8_t> bits) noexcept {
  const auto* p = bits.data();
  const auto n = static_cast<Index>(bits.size());
  std::size_t total = 0;
#pragma omp parallel for simd reduction(+ : total) schedule(static)
  for (Index i = 0; i < n; ++i) total += p[i];
  return total;
}

std::size_t count_and(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept {
  const auto* pa = a.data();
  const auto* pb = b.data();
  const auto n = static_cast<Index>(a.size());
  std::size_t total = 0;
#pragma omp parallel for simd reduction(+ : total) schedule(static)
  for (Index i = 0; i < n; ++i) total += pa[i] & pb[i];
  return total;
}

std::size_t count_or(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept {
  const auto* pa = a.data();
  const auto* pb = b.data();
  const auto n = static_cast<Index>(a.size());
  std::size_t total = 0;
#pragma omp parallel for simd reduction(+ : total) schedule(static)
  for (Index i = 0; i < n; ++i) total += pa[i] | pb[i];
  return total;
}

void and_into(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
              std::span<std::uint8_t> out) noexcept {
  const auto* pa = a.data();
  const auto* pb = b.data();
  auto* po = out.data();
  const auto n = static_cast<Index>(a.size());
#pragma omp parallel for simd schedule(static)
  for (Index i = 0; i < n; ++i) po[i] = pa[i] & pb[i];
}

void and_not_into(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                  std::span<std::uint8_t> out) noexcept {
  const auto* pa = a.data();
  const auto* pb = b.data();
  auto* po = out.data();
  const auto n = static_cast<Index>(a.size());
#pragma omp parallel for simd schedule(static)
  for (Index i = 0; i < n; ++i) po[i] = pa[i] & (pb[i] ^ 1u);
}

void or_into(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
             std::span<std::uint8_t> out) noexcept {
  const auto* pa = a.data();
  const auto* pb = b.data();
  auto* po = out.data();
  const auto n = static_cast<Index>(a.size());
#pragma omp parallel for simd schedule(static)
  for (Index i = 0; i < n; ++i) po[i] = pa[i] | pb[i];
}

void render_columns(std::span<const std::int16_t> values, std::size_t nx, std::size_t ny,
                    std::size_t nz, double lo, double hi, std::span<std::uint8_t> out) noexcept {
  const auto* v = values.data();
  auto* po = out.data();
  const auto slab = nx * ny;
  // One z row of the image per iteration; sums are exact in int64.
#pragma omp parallel
  {
    std::vector<std::int64_t> sums(nx);
#pragma omp for schedule(static)
    for (Index z = 0; z < static_cast<Index>(nz); ++z) {
      std::fill(sums.begin(), sums.end(), 0);
      const auto* base = v + static_cast<std::size_t>(z) * slab;
      for (std::size_t y = 0; y < ny; ++y) {
        const auto* row = base + y * nx;
        for (std::size_t x = 0; x < nx; ++x) sums[x] += row[x];
      }
      auto* dst = po + static_cast<std::size_t>(z) * nx;
      for (std::size_t x = 0; x < nx; ++x) {
        dst[x] = window_pixel(static_cast<double>(sums[x]) / static_cast<double>(ny), lo, hi);
      }
    }
  }
}

void project_columns(std::span<const std::uint8_t> bits, std::size_t nx, std::size_t ny,
                     std::size_t nz, std::span<std::uint8_t> out) noexcept {
  const auto* b = bits.data();
  auto* po = out.data();
  const auto slab = nx * ny;
#pragma omp parallel for schedule(static)
  for (Index z = 0; z < static_cast<Index>(nz); ++z) {
    auto* dst = po + static_cast<std::size_t>(z) * nx;
    std::memset(dst, 0, nx);
    const auto* base = b + static_cast<std::size_t>(z) * slab;
    for (std::size_t y = 0; y < ny; ++y) {
      const auto* row = base + y * nx;
      for (std::size_t x = 0; x < nx; ++x) dst[x] |= row[x];
    }
  }
}

void extrude_columns(std::span<const std::uint8_t> plane, std::size_t nx, std::size_t ny,
                     std::size_t nz, std::span<std::uint8_t> out) noexcept {
  const auto* src = plane.data();
  auto* po = out.data();
  const auto slab = nx * ny;
#pragma omp parallel for schedule(static)
  for (Index z = 0; z < static_cast<Index>(nz); ++z) {
    const auto* row = src + static_cast<std::size_t>(z) * nx;
    auto* base = po + static_cast<std::size_t>(z) * slab;
    for (std::size_t y = 0; y < ny; ++y) std::memcpy(base + y * nx, row, nx);
  }
}

}  // namespace lungcover::kernels
