#include <algorithm>
#include <array>
#include <charconv>
#include <string>

#include "lungcover/error.hpp"
#include "lungcover/io.hpp"
#include "lungcover/phantom.hpp"
#include "lungcover/projection.hpp"
#include "lungcover/rng.hpp"

namespace lungcover::phantom {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kMaxRedraws = 32;
constexpr std::string_view kManifestFormat = "lungcover-cohort/1";

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); }

ordered_json ellipsoid_json(const Ellipsoid& e) {
  return ordered_json{{"center", vec_json(e.center)}, {"semi_axes", vec_json(e.semi_axes)}};
}

ordered_json cap_json(const std::optional<SphereCap>& c) {
  if (!c) return nullptr;
  return ordered_json{{"center", vec_json(c->center)}, {"radius", c->radius}, {"plane_z", c->plane_z}};
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedHeader, "phantom spec: " + what);
}

const ordered_json& field(const ordered_json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) malformed(std::string("missing field '") + key + "'");
  return doc.at(key);
}

double number(const ordered_json& v, const char* what) {
  if (!v.is_number()) malformed(std::string(what) + " must be a number");
  return v.get<double>();
}

Vec3 vec_from(const ordered_json& v, const char* what) {
  if (!v.is_array() || v.size() != 3) malformed(std::string(what) + " must be [x, y, z]");
  return {number(v[0], what), number(v[1], what), number(v[2], what)};
}

Ellipsoid ellipsoid_from(const ordered_json& v, const char* what) {
  return {vec_from(field(v, "center"), what), vec_from(field(v, "semi_axes"), what)};
}

std::optional<SphereCap> cap_from(const ordered_json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  const auto& v = doc.at(key);
  return SphereCap{vec_from(field(v, "center"), key), number(field(v, "radius"), key),
                   number(field(v, "plane_z"), key)};
}

std::int16_t hu_from(const ordered_json& hu, const char* key, std::int16_t fallback) {
  if (!hu.contains(key)) return fallback;
  const auto& v = hu.at(key);
  if (!v.is_number_integer()) malformed(std::string("hu.") + key + " must be an integer");
  const auto value = v.get<std::int64_t>();
  if (value < kMinHu || value > kMaxHu) {
    throw Error(ErrorCode::SpecViolation, std::string("hu.") + key + " outside [-1024, 3071]");
  }
  return static_cast<std::int16_t>(value);
}

std::uint64_t seed_from(const ordered_json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return out;
  }
  malformed("rng_seed must be a non-negative integer");
}

Ellipsoid scaled(const Ellipsoid& e, Rng& rng, double p) {
  Ellipsoid out = e;
  out.semi_axes.x *= rng.uniform(1.0 - p, 1.0 + p);
  out.semi_axes.y *= rng.uniform(1.0 - p, 1.0 + p);
  out.semi_axes.z *= rng.uniform(1.0 - p, 1.0 + p);
  return out;
}

ordered_json oracle_json(const PhantomSpec& spec, Label side) {
  ordered_json out;
  const auto analytic = analytic_obscured_fraction(spec, side);
  const auto quadrature = quadrature_obscured_fraction(spec, side);
  out["analytic_pct"] = analytic ? ordered_json(100.0 * *analytic) : ordered_json(nullptr);
  out["quadrature_pct"] = quadrature ? ordered_json(100.0 * *quadrature) : ordered_json(nullptr);
  out["tolerance_pct"] = voxelization_tolerance_pct(spec, side);
  return out;
}

}  // namespace

GridGeometry default_geometry() { return GridGeometry(256, 256, 244, 1.32, 1.32, 1.25); }

PhantomSpec default_phantom_spec(const GridGeometry& g) {
  const double X = static_cast<double>(g.nx) * g.sx;
  const double Y = static_cast<double>(g.ny) * g.sy;
  const double Z = static_cast<double>(g.nz) * g.sz;
  PhantomSpec s{.geometry = g};
  s.lung_right = {{0.295 * X, 0.515 * Y, 0.53 * Z}, {0.16 * X, 0.22 * Y, 0.36 * Z}};
  s.lung_left = {{0.715 * X, 0.515 * Y, 0.55 * Z}, {0.15 * X, 0.22 * Y, 0.34 * Z}};
  s.heart = Ellipsoid{{0.56 * X, 0.40 * Y, 0.68 * Z}, {0.19 * X, 0.15 * Y, 0.17 * Z}};
  s.diaphragm_right = SphereCap{{0.295 * X, 0.5 * Y, 0.98 * Z}, 0.25 * X, 0.92 * Z};
  s.diaphragm_left = SphereCap{{0.715 * X, 0.5 * Y, 1.0 * Z}, 0.25 * X, 0.92 * Z};
  s.mediastinum = {Slab{0.43 * X, 0.57 * X}};
  s.rng_seed = 0;
  s.annotator_jitter_px = kDefaultJitterPx;
  return s;
}

std::vector<PhantomSpec> cohort_specs(const PhantomSpec& base, std::size_t n, std::uint64_t seed,
                                      double perturbation) {
  if (!(perturbation >= 0.0 && perturbation < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "perturbation must lie in [0, 1)");
  }
  validate(base);
  std::vector<PhantomSpec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxRedraws && !accepted; ++attempt) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i) * 1024u + static_cast<std::uint64_t>(attempt)));
      PhantomSpec s = base;
      s.lung_right = scaled(base.lung_right, rng, perturbation);
      s.lung_left = scaled(base.lung_left, rng, perturbation);
      if (base.heart) s.heart = scaled(*base.heart, rng, perturbation);
      s.rng_seed = base.rng_seed + i;
      try {
        validate(s);
      } catch (const Error&) {
        continue;
      }
      out.push_back(std::move(s));
      accepted = true;
    }
    if (!accepted) {
      throw Error(ErrorCode::SpecViolation,
                  "no valid perturbed spec for case " + std::to_string(i + 1) + "; lower the perturbation");
    }
  }
  return out;
}

std::vector<PhantomCase> generate_cohort(const PhantomSpec& base, std::size_t n, std::uint64_t seed,
                                         double perturbation) {
  std::vector<PhantomCase> out;
  for (const auto& s : cohort_specs(base, n, seed, perturbation)) out.push_back(generate_phantom(s));
  return out;
}

ordered_json to_json(const PhantomSpec& spec) {
  const auto& g = spec.geometry;
  ordered_json mediastinum = ordered_json::array();
  for (const auto& s : spec.mediastinum) mediastinum.push_back({{"x_min", s.x_min}, {"x_max", s.x_max}});
  return ordered_json{
      {"geometry", {{"dims", {g.nx, g.ny, g.nz}}, {"spacing_mm", {g.sx, g.sy, g.sz}}}},
      {"lung_right", ellipsoid_json(spec.lung_right)},
      {"lung_left", ellipsoid_json(spec.lung_left)},
      {"heart", spec.heart ? ellipsoid_json(*spec.heart) : ordered_json(nullptr)},
      {"diaphragm_right", cap_json(spec.diaphragm_right)},
      {"diaphragm_left", cap_json(spec.diaphragm_left)},
      {"mediastinum", mediastinum},
      {"hu",
       {{"air", spec.hu.air},
        {"lung", spec.hu.lung},
        {"soft", spec.hu.soft},
        {"heart", spec.hu.heart},
        {"diaphragm", spec.hu.diaphragm}}},
      {"rng_seed", spec.rng_seed},
      {"annotator_jitter_px", spec.annotator_jitter_px},
  };
}

PhantomSpec spec_from_json(const ordered_json& doc) {
  const auto& geo = field(doc, "geometry");
  const auto& dims = field(geo, "dims");
  const auto& spacing = field(geo, "spacing_mm");
  if (!dims.is_array() || dims.size() != 3 || !spacing.is_array() || spacing.size() != 3) {
    malformed("geometry needs 3 dims and 3 spacings");
  }
  std::array<std::size_t, 3> n{};
  for (int k = 0; k < 3; ++k) {
    if (!dims[k].is_number_unsigned() && !(dims[k].is_number_integer() && dims[k].get<std::int64_t>() > 0)) {
      malformed("dims must be positive integers");
    }
    n[k] = dims[k].get<std::size_t>();
  }
  PhantomSpec s{.geometry = GridGeometry(n[0], n[1], n[2], number(spacing[0], "spacing"),
                                         number(spacing[1], "spacing"), number(spacing[2], "spacing"))};
  s.lung_right = ellipsoid_from(field(doc, "lung_right"), "lung_right");
  s.lung_left = ellipsoid_from(field(doc, "lung_left"), "lung_left");
  if (doc.contains("heart") && !doc.at("heart").is_null()) s.heart = ellipsoid_from(doc.at("heart"), "heart");
  s.diaphragm_right = cap_from(doc, "diaphragm_right");
  s.diaphragm_left = cap_from(doc, "diaphragm_left");
  if (doc.contains("mediastinum")) {
    const auto& slabs = doc.at("mediastinum");
    if (!slabs.is_array()) malformed("mediastinum must be an array");
    for (const auto& v : slabs) s.mediastinum.push_back({number(field(v, "x_min"), "x_min"), number(field(v, "x_max"), "x_max")});
  }
  if (doc.contains("hu")) {
    const auto& hu = doc.at("hu");
    const TissueHu d;
    s.hu = {hu_from(hu, "air", d.air), hu_from(hu, "lung", d.lung), hu_from(hu, "soft", d.soft),
            hu_from(hu, "heart", d.heart), hu_from(hu, "diaphragm", d.diaphragm)};
  }
  if (doc.contains("rng_seed")) s.rng_seed = seed_from(doc.at("rng_seed"));
  if (doc.contains("annotator_jitter_px")) {
    const auto& v = doc.at("annotator_jitter_px");
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() > 64) {
      malformed("annotator_jitter_px must be an integer in [0, 64]");
    }
    s.annotator_jitter_px = v.get<unsigned>();
  }
  return s;
}

std::string case_id_for(std::size_t i, std::size_t n) {
  const auto digits = std::max<std::size_t>(3, std::to_string(n).size());
  auto num = std::to_string(i + 1);
  return "case_" + std::string(digits - std::min(digits, num.size()), '0') + num;
}

void write_case(const PhantomCase& c, const fs::path& dir) {
  fs::create_directories(dir);
  io::save_volume(c.volume, dir / "volume.json");
  io::save_mask3d(c.truth_right, dir / "ct3d_right.json");
  io::save_mask3d(c.truth_left, dir / "ct3d_left.json");
  io::save_mask2d(c.sota2d_right, dir / "drr2d_right.json");
  io::save_mask2d(c.sota2d_left, dir / "drr2d_left.json");
  io::save_mask2d(c.annotator2_right, dir / "drr2d_right_a2.json");
  io::save_mask2d(c.annotator2_left, dir / "drr2d_left_a2.json");
  io::write_pgm(render_drr(c.volume, WindowSpec{}), dir / "drr.pgm");
  io::write_file_atomic(dir / "spec.json", to_json(c.spec).dump(2) + "\n");
}

fs::path write_cohort(const PhantomSpec& base, std::size_t n, std::uint64_t seed, double perturbation,
                      const fs::path& out_dir) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "cohort size must be >= 1");
  const auto specs = cohort_specs(base, n, seed, perturbation);
  fs::create_directories(out_dir);

  ordered_json cases = ordered_json::array();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto id = case_id_for(i, n);
    write_case(generate_phantom(specs[i]), out_dir / id);
    ordered_json oracle;
    for (const auto label : {Label::right, Label::left, Label::both}) {
      oracle[std::string(to_string(label))] = oracle_json(specs[i], label);
    }
    cases.push_back({{"case_id", id}, {"dir", id}, {"spec", "spec.json"}, {"oracle", oracle}});
  }

  ordered_json manifest{
      {"format", kManifestFormat},
      {"n", n},
      {"seed", seed},
      {"perturbation", perturbation},
      {"rng", "mt19937_64 with splitmix64 substreams"},
      {"base_spec", to_json(base)},
      {"cases", cases},
  };
  const auto path = out_dir / "manifest.json";
  io::write_file_atomic(path, manifest.dump(2) + "\n");
  return path;
}

}  // namespace lungcover::phantom
