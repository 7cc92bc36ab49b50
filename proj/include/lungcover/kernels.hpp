#pragma once

// Data-parallel inner loops shared by the projection and concordance
// modules. Each kernel has an OpenMP version in `kernels` and a plain serial
// version in `kernels::reference`; tests pin them to each other and
// bench/ times them against each other. Callers validate sizes.
//
// All reductions are over integers, so results do not depend on the thread
// count or schedule.

#include <cstddef>
#include <cstdint>
#include <span>

namespace lungcover::kernels {

std::size_t count_set(std::span<const std::uint8_t> bits) noexcept;
std::size_t count_and(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept;
std::size_t count_or(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept;

void and_into(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
              std::span<std::uint8_t> out) noexcept;
void and_not_into(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                  std::span<std::uint8_t> out) noexcept;
void or_into(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
             std::span<std::uint8_t> out) noexcept;

/// Mean along y per (x,z) column, windowed into [0,255].
void render_columns(std::span<const std::int16_t> values, std::size_t nx, std::size_t ny,
                    std::size_t nz, double lo, double hi, std::span<std::uint8_t> out) noexcept;

/// OR along y per (x,z) column.
void project_columns(std::span<const std::uint8_t> bits, std::size_t nx, std::size_t ny,
                     std::size_t nz, std::span<std::uint8_t> out) noexcept;

/// Replicate each (x,z) pixel along y.
void extrude_columns(std::span<const std::uint8_t> plane, std::size_t nx, std::size_t ny,
                     std::size_t nz, std::span<std::uint8_t> out) noexcept;

/// Window mapping shared by both implementations so their rounding agrees.
std::uint8_t window_pixel(double mean, double lo, double hi) noexcept;

namespace reference {

std::size_t count_set(std::span<const std::uint8_t> bits) noexcept;
std::size_t count_and(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept;
std::size_t count_or(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept;
void and_into(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
              std::span<std::uint8_t> out) noexcept;
void and_not_into(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                  std::span<std::uint8_t> out) noexcept;
void or_into(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
             std::span<std::uint8_t> out) noexcept;
void render_columns(std::span<const std::int16_t> values, std::size_t nx, std::size_t ny,
                    std::size_t nz, double lo, double hi, std::span<std::uint8_t> out) noexcept;
void project_columns(std::span<const std::uint8_t> bits, std::size_t nx, std::size_t ny,
                     std::size_t nz, std::span<std::uint8_t> out) noexcept;
void extrude_columns(std::span<const std::uint8_t> plane, std::size_t nx, std::size_t ny,
                     std::size_t nz, std::span<std::uint8_t> out) noexcept;

}  // namespace reference
}  // namespace lungcover::kernels
