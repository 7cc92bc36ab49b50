#include <vector>

#include "lungcover/kernels.hpp"

namespace lungcover::kernels::reference {

std::size_t count_set(std::span<const std::uint8_t> bits) noexcept {
  std::size_t total = 0;
  for (auto b : bits) total += b;
  return total;
}

std::size_t count_and(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept {
  std::size_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) total += (a[i] && b[i]) ? 1 : 0;
  return total;
}

std::size_t count_or(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept {
  std::size_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) total += (a[i] || b[i]) ? 1 : 0;
  return total;
}

void and_into(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
              std::span<std::uint8_t> out) noexcept {
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && b[i]) ? 1 : 0;
}

void and_not_into(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                  std::span<std::uint8_t> out) noexcept {
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && !b[i]) ? 1 : 0;
}

void or_into(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
             std::span<std::uint8_t> out) noexcept {
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] || b[i]) ? 1 : 0;
}

// Straight transcription of the definitions: visit every (x,z) column and
// walk it in y.

void render_columns(std::span<const std::int16_t> values, std::size_t nx, std::size_t ny,
                    std::size_t nz, double lo, double hi, std::span<std::uint8_t> out) noexcept {
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t x = 0; x < nx; ++x) {
      std::int64_t sum = 0;
      for (std::size_t y = 0; y < ny; ++y) sum += values[x + nx * (y + ny * z)];
      out[x + nx * z] = window_pixel(static_cast<double>(sum) / static_cast<double>(ny), lo, hi);
    }
  }
}

void project_columns(std::span<const std::uint8_t> bits, std::size_t nx, std::size_t ny,
                     std::size_t nz, std::span<std::uint8_t> out) noexcept {
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t x = 0; x < nx; ++x) {
      std::uint8_t any = 0;
      for (std::size_t y = 0; y < ny && !any; ++y) any = bits[x + nx * (y + ny * z)] ? 1 : 0;
      out[x + nx * z] = any;
    }
  }
}

void extrude_columns(std::span<const std::uint8_t> plane, std::size_t nx, std::size_t ny,
                     std::size_t nz, std::span<std::uint8_t> out) noexcept {
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < nx; ++x) out[x + nx * (y + ny * z)] = plane[x + nx * z];
}

}  // namespace lungcover::kernels::reference
