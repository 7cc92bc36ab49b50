#include "lungcover/projection.hpp"

#include <cmath>

#include "lungcover/error.hpp"
#include "lungcover/kernels.hpp"

namespace lungcover {

WindowSpec::WindowSpec(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw Error(ErrorCode::InvalidArgument, "window needs finite lo < hi");
  }
}

DrrImage render_drr(const VoxelVolume& volume, const WindowSpec& window) {
  const auto& g = volume.geometry();
  std::vector<std::uint8_t> pixels(g.nx * g.nz);
  kernels::render_columns(volume.values(), g.nx, g.ny, g.nz, window.lo, window.hi, pixels);
  return DrrImage(g.nx, g.nz, std::move(pixels));
}

Mask3D extrude_mask(const Mask2D& mask, std::size_t ny, double sy) {
  const GridGeometry g(mask.nx(), ny, mask.nz(), mask.sx(), sy, mask.sz());
  std::vector<std::uint8_t> bits(g.voxel_count());
  kernels::extrude_columns(mask.bits(), g.nx, g.ny, g.nz, bits);
  return Mask3D(g, std::move(bits), mask.label());
}

Mask2D project_mask(const Mask3D& mask) {
  const auto& g = mask.geometry();
  std::vector<std::uint8_t> bits(g.nx * g.nz);
  kernels::project_columns(mask.bits(), g.nx, g.ny, g.nz, bits);
  return Mask2D(g.nx, g.nz, g.sx, g.sz, std::move(bits), mask.label());
}

}  // namespace lungcover
