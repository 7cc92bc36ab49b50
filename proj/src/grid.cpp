#include "lungcover/grid.hpp"

#include <cmath>
#include <string>

#include "lungcover/error.hpp"
#include "lungcover/kernels.hpp"

namespace lungcover {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedMask: return "MalformedMask";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::GeometryMismatch: return "GeometryMismatch";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::BothEmpty: return "BothEmpty";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::TooManySamples: return "TooManySamples";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::AllZeroDifferences: return "AllZeroDifferences";
    case ErrorCode::SpecViolation: return "SpecViolation";
  }
  return "Unknown";
}

namespace {

bool valid_spacing(double s) { return std::isfinite(s) && s > 0.0; }

void check_plane(std::size_t nx, std::size_t nz, double sx, double sz) {
  if (nx == 0 || nz == 0 || !valid_spacing(sx) || !valid_spacing(sz)) {
    throw Error(ErrorCode::InvalidArgument, "2D grid needs positive dims and spacing");
  }
}

void check_binary(std::span<const std::uint8_t> bits) {
  for (auto b : bits) {
    if (b > 1) throw Error(ErrorCode::MalformedMask, "mask cell holds a value other than 0/1");
  }
}

}  // namespace

GridGeometry::GridGeometry(std::size_t nx_, std::size_t ny_, std::size_t nz_, double sx_, double sy_,
                           double sz_)
    : nx(nx_), ny(ny_), nz(nz_), sx(sx_), sy(sy_), sz(sz_) {
  if (nx == 0 || ny == 0 || nz == 0) {
    throw Error(ErrorCode::InvalidArgument, "grid dims must be >= 1");
  }
  if (!valid_spacing(sx) || !valid_spacing(sy) || !valid_spacing(sz)) {
    throw Error(ErrorCode::InvalidArgument, "grid spacing must be finite and > 0");
  }
}

double voxel_volume_ml(const GridGeometry& g) noexcept { return g.sx * g.sy * g.sz / 1000.0; }

std::string_view to_string(Label label) noexcept {
  switch (label) {
    case Label::right: return "right";
    case Label::left: return "left";
    case Label::both: return "both";
  }
  return "both";
}

std::optional<Label> parse_label(std::string_view text) noexcept {
  if (text == "right") return Label::right;
  if (text == "left") return Label::left;
  if (text == "both") return Label::both;
  return std::nullopt;
}

VoxelVolume::VoxelVolume(GridGeometry geometry, std::vector<std::int16_t> values)
    : geometry_(geometry), values_(std::move(values)) {
  if (values_.size() != geometry_.voxel_count()) {
    throw Error(ErrorCode::SizeMismatch, "volume holds " + std::to_string(values_.size()) +
                                             " values, geometry needs " +
                                             std::to_string(geometry_.voxel_count()));
  }
  for (auto v : values_) {
    if (v < kMinHu || v > kMaxHu) {
      throw Error(ErrorCode::ValueOutOfRange, "voxel value " + std::to_string(v) + " outside [-1024, 3071]");
    }
  }
}

VoxelVolume::VoxelVolume(GridGeometry geometry, std::int16_t fill)
    : geometry_(geometry), values_(geometry.voxel_count(), fill) {
  if (fill < kMinHu || fill > kMaxHu) {
    throw Error(ErrorCode::ValueOutOfRange, "fill value outside [-1024, 3071]");
  }
}

Mask3D::Mask3D(GridGeometry geometry, Label label)
    : geometry_(geometry), bits_(geometry.voxel_count(), 0), label_(label) {}

Mask3D::Mask3D(GridGeometry geometry, std::vector<std::uint8_t> bits, Label label)
    : geometry_(geometry), bits_(std::move(bits)), label_(label) {
  if (bits_.size() != geometry_.voxel_count()) {
    throw Error(ErrorCode::SizeMismatch, "mask holds " + std::to_string(bits_.size()) +
                                             " cells, geometry needs " +
                                             std::to_string(geometry_.voxel_count()));
  }
  check_binary(bits_);
}

std::size_t Mask3D::popcount() const noexcept { return kernels::count_set(bits_); }

Mask2D::Mask2D(std::size_t nx, std::size_t nz, double sx, double sz, Label label)
    : nx_(nx), nz_(nz), sx_(sx), sz_(sz), label_(label) {
  check_plane(nx, nz, sx, sz);
  bits_.assign(nx * nz, 0);
}

Mask2D::Mask2D(std::size_t nx, std::size_t nz, double sx, double sz, std::vector<std::uint8_t> bits,
               Label label)
    : nx_(nx), nz_(nz), sx_(sx), sz_(sz), bits_(std::move(bits)), label_(label) {
  check_plane(nx, nz, sx, sz);
  if (bits_.size() != nx * nz) {
    throw Error(ErrorCode::SizeMismatch, "2D mask holds " + std::to_string(bits_.size()) +
                                             " cells, dims need " + std::to_string(nx * nz));
  }
  check_binary(bits_);
}

std::size_t Mask2D::popcount() const noexcept { return kernels::count_set(bits_); }

DrrImage::DrrImage(std::size_t nx, std::size_t nz, std::vector<std::uint8_t> pixels)
    : nx_(nx), nz_(nz), pixels_(std::move(pixels)) {
  if (nx == 0 || nz == 0) throw Error(ErrorCode::InvalidArgument, "DRR dims must be >= 1");
  if (pixels_.size() != nx * nz) {
    throw Error(ErrorCode::SizeMismatch, "DRR pixel count does not match dims");
  }
}

}  // namespace lungcover
