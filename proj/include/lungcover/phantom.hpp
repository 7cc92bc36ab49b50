#pragma once

// Parametric synthetic chest with exact ground truth.
//
// Anatomy is a set of axis-aligned primitives in millimetres (grid frame, see
// grid.hpp): two lung ellipsoids, an optional heart ellipsoid, optional
// diaphragm domes (sphere caps) and optional mediastinal slabs (bands in x
// spanning the whole y-z plane). A voxel belongs to a primitive when its
// centre does. Painting priority in the volume is
//   heart / diaphragm / mediastinum  >  lung  >  torso (soft)  >  air.
//
// The contour-style 2D mask of each lung is its coronal silhouette minus the
// union of the occluder silhouettes. The truth masks are the voxelized lung
// ellipsoids, including voxels painted over by an occluder.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "lungcover/grid.hpp"

namespace lungcover::phantom {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
  bool operator==(const Vec3&) const = default;
};

struct Ellipsoid {
  Vec3 center;
  Vec3 semi_axes;
  bool contains(double x, double y, double z) const noexcept;
  double volume_mm3() const noexcept;
  bool operator==(const Ellipsoid&) const = default;
};

/// The part of a sphere lying at z <= plane_z (towards the head): a dome
/// whose top is at center.z - radius.
struct SphereCap {
  Vec3 center;
  double radius = 0.0;
  double plane_z = 0.0;
  bool contains(double x, double y, double z) const noexcept;
  bool operator==(const SphereCap&) const = default;
};

/// Band x_min <= x <= x_max across the full y-z extent.
struct Slab {
  double x_min = 0.0;
  double x_max = 0.0;
  bool operator==(const Slab&) const = default;
};

struct TissueHu {
  std::int16_t air = -1000;
  std::int16_t lung = -800;
  std::int16_t soft = 0;
  std::int16_t heart = 40;
  std::int16_t diaphragm = 50;
  bool operator==(const TissueHu&) const = default;
};

struct PhantomSpec {
  GridGeometry geometry;
  Ellipsoid lung_right{};
  Ellipsoid lung_left{};
  std::optional<Ellipsoid> heart{};
  std::optional<SphereCap> diaphragm_right{};
  std::optional<SphereCap> diaphragm_left{};
  std::vector<Slab> mediastinum{};
  TissueHu hu{};
  std::uint64_t rng_seed = 0;
  unsigned annotator_jitter_px = 0;

  bool operator==(const PhantomSpec&) const = default;
};

/// Soft-tissue body outline: centred in x-y, spanning every slice.
Ellipsoid torso_for(const GridGeometry& g) noexcept;

/// Throws Error(SpecViolation) when a lung leaves the grid, the lungs share
/// a voxel, or an HU value is outside [-1024, 3071].
void validate(const PhantomSpec& spec);

struct PhantomCase {
  PhantomSpec spec;
  VoxelVolume volume;
  Mask3D truth_right;
  Mask3D truth_left;
  Mask2D sota2d_right;
  Mask2D sota2d_left;
  Mask2D annotator2_right;
  Mask2D annotator2_left;
};

PhantomCase generate_phantom(const PhantomSpec& spec);

/// Seeded boundary jitter: every boundary pixel of `mask`, in raster order,
/// grows or erodes a disc of radius 1..radius_px (or leaves it alone).
/// radius_px == 0 returns the mask unchanged; otherwise the result always
/// differs from the input.
Mask2D jitter_mask(const Mask2D& mask, unsigned radius_px, std::uint64_t seed);

/// Closed-form obscured fraction in [0, 1] for a lung whose only occluders
/// are mediastinal slabs (and any other occluder provably outside its
/// silhouette). The slab cut reduces to spherical caps after rescaling the
/// ellipsoid to the unit sphere. nullopt when no closed form applies.
std::optional<double> analytic_obscured_fraction(const PhantomSpec& spec, Label side);

/// Obscured fraction in [0, 1] for any configuration, by integrating the
/// lung's y-chord over the occluded part of its silhouette: exact in x,
/// Gauss-Legendre in z. nullopt only for Label::both when the two lung
/// silhouettes overlap.
std::optional<double> quadrature_obscured_fraction(const PhantomSpec& spec, Label side);

/// Fraction of a unit ball with first coordinate below u (u clamped to
/// [-1, 1]): h^2 (3 - h) / 4 with cap height h = u + 1.
double unit_ball_cap_fraction(double u) noexcept;

/// Scale C of the voxelization tolerance C * 100 * max(sx, sz) / min(ax, az).
inline constexpr double kToleranceScale = 0.5;

/// Tolerance, in percentage points, between a voxel-counted fraction and
/// the continuous oracles for this spec and side.
double voxelization_tolerance_pct(const PhantomSpec& spec, Label side);

/// Anatomy laid out proportionally to the grid's field of view.
PhantomSpec default_phantom_spec(const GridGeometry& geometry);
/// Default geometry for `phantom --spec default`.
GridGeometry default_geometry();
inline constexpr unsigned kDefaultJitterPx = 1;
inline constexpr double kDefaultPerturbation = 0.15;

/// Per-case specs: sizes of lungs and heart scaled per axis by factors in
/// [1 - perturbation, 1 + perturbation]; case i uses jitter seed
/// base.rng_seed + i. Invalid draws are redrawn from the next substream.
std::vector<PhantomSpec> cohort_specs(const PhantomSpec& base, std::size_t n, std::uint64_t seed,
                                      double perturbation = kDefaultPerturbation);
std::vector<PhantomCase> generate_cohort(const PhantomSpec& base, std::size_t n, std::uint64_t seed,
                                         double perturbation = kDefaultPerturbation);

nlohmann::ordered_json to_json(const PhantomSpec& spec);
PhantomSpec spec_from_json(const nlohmann::ordered_json& doc);

/// Case directory name for zero-based index i of n: case_001 ...
std::string case_id_for(std::size_t i, std::size_t n);

/// Writes one case directory (volume, truth masks, contour masks for both
/// annotators, a DRR preview).
void write_case(const PhantomCase& c, const std::filesystem::path& dir);

/// Generates and writes a cohort case by case; returns the manifest path.
std::filesystem::path write_cohort(const PhantomSpec& base, std::size_t n, std::uint64_t seed, double perturbation,
                                   const std::filesystem::path& out_dir);

}  // namespace lungcover::phantom
