#pragma once

// Orthographic projection along y (anterior-posterior): DRR rendering and the
// 2D <-> 3D mask transforms.

#include <cstddef>

#include "lungcover/grid.hpp"

namespace lungcover {

/// Linear display window in HU. Requires lo < hi.
struct WindowSpec {
  double lo = -1000.0;
  double hi = 200.0;

  WindowSpec() = default;
  WindowSpec(double lo, double hi);
};

/// Each pixel is round(255 * clamp((mean_y - lo) / (hi - lo), 0, 1)) where
/// mean_y is the plain average of the column; output is nx x nz.
DrrImage render_drr(const VoxelVolume& volume, const WindowSpec& window);

/// Replicates the 2D mask ny times along y; spacing (m.sx, sy, m.sz).
Mask3D extrude_mask(const Mask2D& mask, std::size_t ny, double sy);

/// OR over y per column: the mask's coronal silhouette.
Mask2D project_mask(const Mask3D& mask);

}  // namespace lungcover
