#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace lungcover {

// Axis convention: x = patient right-to-left, y = anterior-to-posterior (the
// projection axis), z = cranio-caudal with z index growing towards the feet.
// The coronal plane is x-z. Voxel (i,j,k) has its centre at
// ((i+0.5)*sx, (j+0.5)*sy, (k+0.5)*sz) millimetres.

struct GridGeometry {
  std::size_t nx = 1, ny = 1, nz = 1;
  double sx = 1.0, sy = 1.0, sz = 1.0;

  GridGeometry() = default;
  /// Throws Error(InvalidArgument) unless every count is >= 1 and every
  /// spacing is finite and > 0.
  GridGeometry(std::size_t nx, std::size_t ny, std::size_t nz, double sx, double sy, double sz);

  std::size_t voxel_count() const noexcept { return nx * ny * nz; }
  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + nx * (y + ny * z);
  }
  double center_x(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * sx; }
  double center_y(std::size_t j) const noexcept { return (static_cast<double>(j) + 0.5) * sy; }
  double center_z(std::size_t k) const noexcept { return (static_cast<double>(k) + 0.5) * sz; }

  bool operator==(const GridGeometry&) const = default;
};

/// Volume of one voxel in millilitres (mm^3 / 1000).
double voxel_volume_ml(const GridGeometry& g) noexcept;

enum class Label { right, left, both };

std::string_view to_string(Label label) noexcept;
std::optional<Label> parse_label(std::string_view text) noexcept;

inline constexpr std::int16_t kMinHu = -1024;
inline constexpr std::int16_t kMaxHu = 3071;

/// CT-like scalar grid. Values are HU, stored x-fastest, then y, then z.
class VoxelVolume {
 public:
  VoxelVolume(GridGeometry geometry, std::vector<std::int16_t> values);
  /// Uniformly filled volume.
  VoxelVolume(GridGeometry geometry, std::int16_t fill);

  const GridGeometry& geometry() const noexcept { return geometry_; }
  std::span<const std::int16_t> values() const noexcept { return values_; }
  std::int16_t at(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return values_[geometry_.index(x, y, z)];
  }

  bool operator==(const VoxelVolume&) const = default;

 private:
  GridGeometry geometry_;
  std::vector<std::int16_t> values_;
};

/// Binary occupancy over a 3D grid, one byte (0 or 1) per voxel.
class Mask3D {
 public:
  Mask3D(GridGeometry geometry, Label label);
  Mask3D(GridGeometry geometry, std::vector<std::uint8_t> bits, Label label);

  const GridGeometry& geometry() const noexcept { return geometry_; }
  Label label() const noexcept { return label_; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::span<std::uint8_t> mutable_bits() noexcept { return bits_; }

  bool at(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return bits_[geometry_.index(x, y, z)] != 0;
  }
  void set(std::size_t x, std::size_t y, std::size_t z, bool on = true) noexcept {
    bits_[geometry_.index(x, y, z)] = on ? 1 : 0;
  }
  std::size_t popcount() const noexcept;

  bool operator==(const Mask3D&) const = default;

 private:
  GridGeometry geometry_;
  std::vector<std::uint8_t> bits_;
  Label label_;
};

/// Binary occupancy over the coronal plane, x-fastest then z.
class Mask2D {
 public:
  Mask2D(std::size_t nx, std::size_t nz, double sx, double sz, Label label);
  Mask2D(std::size_t nx, std::size_t nz, double sx, double sz, std::vector<std::uint8_t> bits,
         Label label);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t nz() const noexcept { return nz_; }
  double sx() const noexcept { return sx_; }
  double sz() const noexcept { return sz_; }
  Label label() const noexcept { return label_; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::span<std::uint8_t> mutable_bits() noexcept { return bits_; }

  std::size_t index(std::size_t x, std::size_t z) const noexcept { return x + nx_ * z; }
  bool at(std::size_t x, std::size_t z) const noexcept { return bits_[index(x, z)] != 0; }
  void set(std::size_t x, std::size_t z, bool on = true) noexcept { bits_[index(x, z)] = on ? 1 : 0; }
  std::size_t popcount() const noexcept;

  /// Same pixel grid (dims and spacing); labels are not compared.
  bool same_grid(const Mask2D& other) const noexcept {
    return nx_ == other.nx_ && nz_ == other.nz_ && sx_ == other.sx_ && sz_ == other.sz_;
  }
  /// True when this mask lies on the coronal plane of `g`.
  bool matches_coronal(const GridGeometry& g) const noexcept {
    return nx_ == g.nx && nz_ == g.nz && sx_ == g.sx && sz_ == g.sz;
  }

  bool operator==(const Mask2D&) const = default;

 private:
  std::size_t nx_, nz_;
  double sx_, sz_;
  std::vector<std::uint8_t> bits_;
  Label label_;
};

/// 8-bit coronal image, x-fastest then z.
class DrrImage {
 public:
  DrrImage(std::size_t nx, std::size_t nz, std::vector<std::uint8_t> pixels);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t nz() const noexcept { return nz_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::uint8_t at(std::size_t x, std::size_t z) const noexcept { return pixels_[x + nx_ * z]; }

  bool operator==(const DrrImage&) const = default;

 private:
  std::size_t nx_, nz_;
  std::vector<std::uint8_t> pixels_;
};

}  // namespace lungcover
