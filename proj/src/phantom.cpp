#include "lungcover/phantom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "lungcover/error.hpp"
#include "lungcover/projection.hpp"
#include "lungcover/rng.hpp"

namespace lungcover::phantom {

namespace {

using Index = std::ptrdiff_t;

inline double sq(double v) { return v * v; }

struct Interval {
  double lo, hi;
};

struct Box2 {
  Interval x, z;
};

bool overlaps(const Interval& a, const Interval& b) { return a.lo <= b.hi && b.lo <= a.hi; }

Box2 silhouette_box(const Ellipsoid& e) {
  return {{e.center.x - e.semi_axes.x, e.center.x + e.semi_axes.x},
          {e.center.z - e.semi_axes.z, e.center.z + e.semi_axes.z}};
}

std::optional<Box2> silhouette_box(const SphereCap& c) {
  const double top = c.center.z - c.radius;
  const double bottom = std::min(c.plane_z, c.center.z + c.radius);
  if (bottom < top) return std::nullopt;
  return Box2{{c.center.x - c.radius, c.center.x + c.radius}, {top, bottom}};
}

const Ellipsoid& lung_of(const PhantomSpec& spec, Label side) {
  return side == Label::right ? spec.lung_right : spec.lung_left;
}

void check_hu(std::int16_t v, const char* name) {
  if (v < kMinHu || v > kMaxHu) {
    throw Error(ErrorCode::SpecViolation, std::string("HU value for ") + name + " outside [-1024, 3071]");
  }
}

void check_inside(const Ellipsoid& e, const GridGeometry& g, const char* name) {
  const auto& c = e.center;
  const auto& r = e.semi_axes;
  if (!(r.x > 0 && r.y > 0 && r.z > 0)) {
    throw Error(ErrorCode::SpecViolation, std::string(name) + " needs positive semi-axes");
  }
  const bool inside = c.x - r.x >= 0.0 && c.x + r.x <= static_cast<double>(g.nx) * g.sx && c.y - r.y >= 0.0 &&
                      c.y + r.y <= static_cast<double>(g.ny) * g.sy && c.z - r.z >= 0.0 &&
                      c.z + r.z <= static_cast<double>(g.nz) * g.sz;
  if (!inside) throw Error(ErrorCode::SpecViolation, std::string(name) + " extends outside the grid");
}

// Voxel index range whose centres can lie in [lo, hi] along an axis.
std::pair<std::size_t, std::size_t> index_range(double lo, double hi, double spacing, std::size_t n) {
  const double first = std::ceil(lo / spacing - 0.5);
  const double last = std::floor(hi / spacing - 0.5);
  const auto a = static_cast<std::size_t>(std::clamp(first, 0.0, static_cast<double>(n)));
  const auto b = static_cast<std::size_t>(std::clamp(last + 1.0, 0.0, static_cast<double>(n)));
  return {a, std::max(a, b)};
}

bool lungs_share_voxel(const PhantomSpec& spec) {
  const auto& g = spec.geometry;
  const auto& a = spec.lung_right;
  const auto& b = spec.lung_left;
  auto axis = [](const Ellipsoid& e, int k) {
    const double c = k == 0 ? e.center.x : k == 1 ? e.center.y : e.center.z;
    const double r = k == 0 ? e.semi_axes.x : k == 1 ? e.semi_axes.y : e.semi_axes.z;
    return Interval{c - r, c + r};
  };
  std::array<std::pair<std::size_t, std::size_t>, 3> range;
  const std::array<double, 3> spacing{g.sx, g.sy, g.sz};
  const std::array<std::size_t, 3> count{g.nx, g.ny, g.nz};
  for (int k = 0; k < 3; ++k) {
    const auto ia = axis(a, k);
    const auto ib = axis(b, k);
    if (!overlaps(ia, ib)) return false;
    range[k] = index_range(std::max(ia.lo, ib.lo), std::min(ia.hi, ib.hi), spacing[k], count[k]);
  }
  for (auto k = range[2].first; k < range[2].second; ++k)
    for (auto j = range[1].first; j < range[1].second; ++j)
      for (auto i = range[0].first; i < range[0].second; ++i) {
        const double x = g.center_x(i), y = g.center_y(j), z = g.center_z(k);
        if (a.contains(x, y, z) && b.contains(x, y, z)) return true;
      }
  return false;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
template <std::size_t N>
struct GaussLegendre {
  std::array<double, N> node{}, weight{};
  GaussLegendre() {
    for (std::size_t i = 0; i < N; ++i) {
      double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
          p0 = p1;
          p1 = p2;
        }
        dp = static_cast<double>(N) * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      node[i] = x;
      weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

// Occluded x-intervals (mm) of the combined occluder silhouette at height z.
std::vector<Interval> occluded_at(const PhantomSpec& spec, double z) {
  std::vector<Interval> out;
  for (const auto& s : spec.mediastinum) out.push_back({s.x_min, s.x_max});
  if (spec.heart) {
    const auto& h = *spec.heart;
    const double t = 1.0 - sq((z - h.center.z) / h.semi_axes.z);
    if (t >= 0.0) {
      const double hw = h.semi_axes.x * std::sqrt(t);
      out.push_back({h.center.x - hw, h.center.x + hw});
    }
  }
  for (const auto* cap : {&spec.diaphragm_right, &spec.diaphragm_left}) {
    if (!*cap) continue;
    const auto& c = **cap;
    if (z > c.plane_z) continue;
    const double t = sq(c.radius) - sq(z - c.center.z);
    if (t >= 0.0) {
      const double hw = std::sqrt(t);
      out.push_back({c.center.x - hw, c.center.x + hw});
    }
  }
  std::sort(out.begin(), out.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& iv : out) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

// Integral of sqrt(rho^2 - u^2) from -rho to u.
double half_disc_area(double u, double rho) {
  u = std::clamp(u, -rho, rho);
  return 0.5 * (u * std::sqrt(std::max(0.0, rho * rho - u * u)) + rho * rho * std::asin(u / rho)) +
         0.25 * std::numbers::pi * rho * rho;
}

double side_quadrature(const PhantomSpec& spec, const Ellipsoid& lung) {
  static const GaussLegendre<10> gl;
  const auto& c = lung.center;
  const auto& r = lung.semi_axes;

  // Breakpoints in w = (z - cz) / rz where occluder profiles start or stop.
  std::vector<double> breaks{-1.0, 1.0};
  auto add_break = [&](double z) {
    const double w = (z - c.z) / r.z;
    if (w > -1.0 && w < 1.0) breaks.push_back(w);
  };
  if (spec.heart) {
    add_break(spec.heart->center.z - spec.heart->semi_axes.z);
    add_break(spec.heart->center.z + spec.heart->semi_axes.z);
  }
  for (const auto* cap : {&spec.diaphragm_right, &spec.diaphragm_left}) {
    if (!*cap) continue;
    add_break((*cap)->center.z - (*cap)->radius);
    add_break((*cap)->center.z + (*cap)->radius);
    add_break((*cap)->plane_z);
  }
  std::sort(breaks.begin(), breaks.end());

  auto integrand = [&](double w) {
    const double rho2 = 1.0 - w * w;
    if (rho2 <= 0.0) return 0.0;
    const double rho = std::sqrt(rho2);
    double sum = 0.0;
    for (const auto& iv : occluded_at(spec, c.z + w * r.z)) {
      const double u0 = (iv.lo - c.x) / r.x;
      const double u1 = (iv.hi - c.x) / r.x;
      if (u1 <= -rho || u0 >= rho) continue;
      sum += half_disc_area(u1, rho) - half_disc_area(u0, rho);
    }
    return sum;
  };

  constexpr int panels = 256;
  double total = 0.0;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double a0 = breaks[b], a1 = breaks[b + 1];
    if (a1 <= a0) continue;
    const double h = (a1 - a0) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = a0 + (p + 0.5) * h;
      for (std::size_t k = 0; k < gl.node.size(); ++k) total += 0.5 * h * gl.weight[k] * integrand(mid + 0.5 * h * gl.node[k]);
    }
  }
  // Volume of the unit ball in (u, y, w) is 4 pi / 3; the chord is 2 sqrt(.).
  return std::clamp(2.0 * total / (4.0 * std::numbers::pi / 3.0), 0.0, 1.0);
}

std::optional<double> combine_sides(const PhantomSpec& spec, std::optional<double> fr, std::optional<double> fl) {
  if (!fr || !fl) return std::nullopt;
  const auto br = silhouette_box(spec.lung_right);
  const auto bl = silhouette_box(spec.lung_left);
  if (overlaps(br.x, bl.x) && overlaps(br.z, bl.z)) return std::nullopt;
  const double vr = spec.lung_right.volume_mm3();
  const double vl = spec.lung_left.volume_mm3();
  return (*fr * vr + *fl * vl) / (vr + vl);
}

void paint_disc(Mask2D& m, std::size_t cx, std::size_t cz, unsigned radius, bool on) {
  const auto r = static_cast<Index>(radius);
  for (Index dz = -r; dz <= r; ++dz) {
    for (Index dx = -r; dx <= r; ++dx) {
      if (dx * dx + dz * dz > r * r) continue;
      const Index x = static_cast<Index>(cx) + dx;
      const Index z = static_cast<Index>(cz) + dz;
      if (x < 0 || z < 0 || x >= static_cast<Index>(m.nx()) || z >= static_cast<Index>(m.nz())) continue;
      m.set(static_cast<std::size_t>(x), static_cast<std::size_t>(z), on);
    }
  }
}

bool is_boundary(const Mask2D& m, std::size_t x, std::size_t z) {
  if (!m.at(x, z)) return false;
  if (x == 0 || z == 0 || x + 1 == m.nx() || z + 1 == m.nz()) return true;
  return !m.at(x - 1, z) || !m.at(x + 1, z) || !m.at(x, z - 1) || !m.at(x, z + 1);
}

}  // namespace

bool Ellipsoid::contains(double x, double y, double z) const noexcept {
  return sq((x - center.x) / semi_axes.x) + sq((y - center.y) / semi_axes.y) + sq((z - center.z) / semi_axes.z) <= 1.0;
}

double Ellipsoid::volume_mm3() const noexcept {
  return 4.0 / 3.0 * std::numbers::pi * semi_axes.x * semi_axes.y * semi_axes.z;
}

bool SphereCap::contains(double x, double y, double z) const noexcept {
  return z <= plane_z && sq(x - center.x) + sq(y - center.y) + sq(z - center.z) <= radius * radius;
}

Ellipsoid torso_for(const GridGeometry& g) noexcept {
  const double fx = static_cast<double>(g.nx) * g.sx;
  const double fy = static_cast<double>(g.ny) * g.sy;
  const double fz = static_cast<double>(g.nz) * g.sz;
  return {{0.5 * fx, 0.5 * fy, 0.5 * fz}, {0.46 * fx, 0.36 * fy, 2.0 * fz}};
}

void validate(const PhantomSpec& spec) {
  check_inside(spec.lung_right, spec.geometry, "lung_right");
  check_inside(spec.lung_left, spec.geometry, "lung_left");
  if (spec.heart && !(spec.heart->semi_axes.x > 0 && spec.heart->semi_axes.y > 0 && spec.heart->semi_axes.z > 0)) {
    throw Error(ErrorCode::SpecViolation, "heart needs positive semi-axes");
  }
  for (const auto* cap : {&spec.diaphragm_right, &spec.diaphragm_left}) {
    if (*cap && !((*cap)->radius > 0)) throw Error(ErrorCode::SpecViolation, "diaphragm radius must be > 0");
  }
  for (const auto& s : spec.mediastinum) {
    if (!(s.x_min <= s.x_max)) throw Error(ErrorCode::SpecViolation, "mediastinum slab needs x_min <= x_max");
  }
  check_hu(spec.hu.air, "air");
  check_hu(spec.hu.lung, "lung");
  check_hu(spec.hu.soft, "soft");
  check_hu(spec.hu.heart, "heart");
  check_hu(spec.hu.diaphragm, "diaphragm");
  if (lungs_share_voxel(spec)) throw Error(ErrorCode::SpecViolation, "lung ellipsoids intersect");
}

Mask2D jitter_mask(const Mask2D& mask, unsigned radius_px, std::uint64_t seed) {
  Mask2D out = mask;
  if (radius_px == 0) return out;
  Rng rng(seed);
  std::optional<std::pair<std::size_t, std::size_t>> first;
  for (std::size_t z = 0; z < mask.nz(); ++z) {
    for (std::size_t x = 0; x < mask.nx(); ++x) {
      if (!is_boundary(mask, x, z)) continue;
      if (!first) first = {x, z};
      const double u = rng.uniform();
      const auto radius = static_cast<unsigned>(1 + rng.below(radius_px));
      if (u < 1.0 / 3.0) {
        paint_disc(out, x, z, radius, true);
      } else if (u < 2.0 / 3.0) {
        paint_disc(out, x, z, radius, false);
      }
    }
  }
  if (first && out == mask) out.set(first->first, first->second, false);
  return out;
}

PhantomCase generate_phantom(const PhantomSpec& spec) {
  validate(spec);
  const auto& g = spec.geometry;
  const auto torso = torso_for(g);
  const auto& hu = spec.hu;

  std::vector<std::int16_t> values(g.voxel_count(), hu.air);
  std::vector<std::uint8_t> right(g.voxel_count(), 0), left(g.voxel_count(), 0);
  std::vector<std::uint8_t> occluded(g.nx * g.nz, 0);

  // Per-column slab membership does not depend on y or z.
  std::vector<std::uint8_t> in_slab(g.nx, 0);
  for (std::size_t i = 0; i < g.nx; ++i) {
    const double x = g.center_x(i);
    for (const auto& s : spec.mediastinum) in_slab[i] |= (x >= s.x_min && x <= s.x_max) ? 1 : 0;
  }

  // Each z slab writes only its own voxels and its own row of `occluded`.
#pragma omp parallel for schedule(dynamic, 1)
  for (Index k = 0; k < static_cast<Index>(g.nz); ++k) {
    const double z = g.center_z(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < g.ny; ++j) {
      const double y = g.center_y(j);
      for (std::size_t i = 0; i < g.nx; ++i) {
        const double x = g.center_x(i);
        const auto idx = g.index(i, j, static_cast<std::size_t>(k));
        const bool lr = spec.lung_right.contains(x, y, z);
        const bool ll = spec.lung_left.contains(x, y, z);
        const bool heart = spec.heart && spec.heart->contains(x, y, z);
        const bool dia = (spec.diaphragm_right && spec.diaphragm_right->contains(x, y, z)) ||
                         (spec.diaphragm_left && spec.diaphragm_left->contains(x, y, z));
        const bool slab = in_slab[i] != 0;
        const bool body = torso.contains(x, y, z);
        right[idx] = lr;
        left[idx] = ll;
        if (heart || dia || slab) occluded[i + g.nx * static_cast<std::size_t>(k)] = 1;

        std::int16_t v = hu.air;
        if (heart) {
          v = hu.heart;
        } else if (dia) {
          v = hu.diaphragm;
        } else if (slab && (body || lr || ll)) {
          v = hu.soft;
        } else if (lr || ll) {
          v = hu.lung;
        } else if (body) {
          v = hu.soft;
        }
        values[idx] = v;
      }
    }
  }

  Mask3D truth_right(g, std::move(right), Label::right);
  Mask3D truth_left(g, std::move(left), Label::left);
  auto contour = [&](const Mask3D& truth) {
    auto m = project_mask(truth);
    auto bits = m.mutable_bits();
    for (std::size_t p = 0; p < bits.size(); ++p) bits[p] &= static_cast<std::uint8_t>(occluded[p] ^ 1u);
    return m;
  };
  auto sota_right = contour(truth_right);
  auto sota_left = contour(truth_left);
  auto a2_right = jitter_mask(sota_right, spec.annotator_jitter_px, derive_seed(spec.rng_seed, 1));
  auto a2_left = jitter_mask(sota_left, spec.annotator_jitter_px, derive_seed(spec.rng_seed, 2));

  return PhantomCase{spec,
                     VoxelVolume(g, std::move(values)),
                     std::move(truth_right),
                     std::move(truth_left),
                     std::move(sota_right),
                     std::move(sota_left),
                     std::move(a2_right),
                     std::move(a2_left)};
}

double unit_ball_cap_fraction(double u) noexcept {
  const double h = std::clamp(u, -1.0, 1.0) + 1.0;
  return h * h * (3.0 - h) / 4.0;
}

std::optional<double> analytic_obscured_fraction(const PhantomSpec& spec, Label side) {
  if (side == Label::both) {
    return combine_sides(spec, analytic_obscured_fraction(spec, Label::right),
                         analytic_obscured_fraction(spec, Label::left));
  }
  const auto& lung = lung_of(spec, side);
  const auto box = silhouette_box(lung);
  auto touches = [&](const Box2& b) { return overlaps(b.x, box.x) && overlaps(b.z, box.z); };
  if (spec.heart && touches(silhouette_box(*spec.heart))) return std::nullopt;
  for (const auto* cap : {&spec.diaphragm_right, &spec.diaphragm_left}) {
    if (!*cap) continue;
    if (auto b = silhouette_box(**cap); b && touches(*b)) return std::nullopt;
  }

  std::vector<Interval> cuts;
  for (const auto& s : spec.mediastinum) {
    cuts.push_back({(s.x_min - lung.center.x) / lung.semi_axes.x, (s.x_max - lung.center.x) / lung.semi_axes.x});
  }
  std::sort(cuts.begin(), cuts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double fraction = 0.0;
  double covered_to = -1.0;  // cuts are merged on the fly
  for (const auto& c : cuts) {
    const double lo = std::max(c.lo, covered_to);
    if (c.hi <= lo) continue;
    fraction += unit_ball_cap_fraction(c.hi) - unit_ball_cap_fraction(lo);
    covered_to = c.hi;
  }
  return std::clamp(fraction, 0.0, 1.0);
}

namespace {
double quadrature_obscured_fraction_side(const PhantomSpec& spec, Label side) {
  return side_quadrature(spec, lung_of(spec, side));
}
}  // namespace

std::optional<double> quadrature_obscured_fraction(const PhantomSpec& spec, Label side) {
  if (side != Label::both) return quadrature_obscured_fraction_side(spec, side);
  return combine_sides(spec, quadrature_obscured_fraction_side(spec, Label::right),
                       quadrature_obscured_fraction_side(spec, Label::left));
}

double voxelization_tolerance_pct(const PhantomSpec& spec, Label side) {
  const auto& g = spec.geometry;
  auto side_tol = [&](const Ellipsoid& lung) {
    const double radius = std::min(lung.semi_axes.x, lung.semi_axes.z);
    return 100.0 * kToleranceScale * std::max(g.sx, g.sz) / radius;
  };
  if (side == Label::both) return std::max(side_tol(spec.lung_right), side_tol(spec.lung_left));
  return side_tol(lung_of(spec, side));
}

}  // namespace lungcover::phantom
