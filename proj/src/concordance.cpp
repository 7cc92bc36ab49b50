#include "lungcover/concordance.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "lungcover/error.hpp"
#include "lungcover/kernels.hpp"
#include "lungcover/projection.hpp"

namespace lungcover {

using json = nlohmann::ordered_json;

namespace {

std::string dims_text(const GridGeometry& g) {
  return std::to_string(g.nx) + "x" + std::to_string(g.ny) + "x" + std::to_string(g.nz);
}

std::string dims_text(const Mask2D& m) { return std::to_string(m.nx()) + "x" + std::to_string(m.nz()); }

void require_same(const GridGeometry& a, const GridGeometry& b) {
  if (!(a == b)) {
    throw Error(ErrorCode::GeometryMismatch,
                "3D masks differ in geometry: " + dims_text(a) + " vs " + dims_text(b));
  }
}

void require_same(const Mask2D& a, const Mask2D& b) {
  if (!a.same_grid(b)) {
    throw Error(ErrorCode::GeometryMismatch, "2D masks differ in geometry: " + dims_text(a) + " vs " + dims_text(b));
  }
}

void require_coronal(const Mask2D& m, const GridGeometry& g) {
  if (!m.matches_coronal(g)) {
    throw Error(ErrorCode::GeometryMismatch, "2D mask " + dims_text(m) + " does not match the x-z plane of " +
                                                 dims_text(g));
  }
}

struct Counts {
  std::size_t a, b, both;
};

Counts overlap_counts(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  return {kernels::count_set(a), kernels::count_set(b), kernels::count_and(a, b)};
}

double dice_from(const Counts& c) {
  if (c.a + c.b == 0) throw Error(ErrorCode::BothEmpty, "Dice of two empty masks is undefined");
  return 2.0 * static_cast<double>(c.both) / static_cast<double>(c.a + c.b);
}

double jaccard_from(const Counts& c) {
  const auto uni = c.a + c.b - c.both;
  if (uni == 0) throw Error(ErrorCode::BothEmpty, "Jaccard of two empty masks is undefined");
  return static_cast<double>(c.both) / static_cast<double>(uni);
}

SideReport side_report(const Mask3D& ct, const Mask2D& m2d, double voxel_ml) {
  require_coronal(m2d, ct.geometry());
  const auto covered_3d = extrude_mask(m2d, ct.geometry().ny, ct.geometry().sy);
  SideReport r;
  r.total_voxels = ct.popcount();
  if (r.total_voxels == 0) {
    throw Error(ErrorCode::EmptyReference, std::string("3D ") + std::string(to_string(ct.label())) +
                                               " lung mask is empty");
  }
  r.covered_voxels = kernels::count_and(ct.bits(), covered_3d.bits());
  r.obscured_voxels = r.total_voxels - r.covered_voxels;
  r.total_ml = static_cast<double>(r.total_voxels) * voxel_ml;
  r.covered_ml = static_cast<double>(r.covered_voxels) * voxel_ml;
  r.obscured_ml = static_cast<double>(r.obscured_voxels) * voxel_ml;
  r.obscured_fraction_pct = 100.0 * static_cast<double>(r.obscured_voxels) / static_cast<double>(r.total_voxels);
  return r;
}

json side_json(const SideReport& s) {
  json j;
  j["total_voxels"] = s.total_voxels;
  j["covered_voxels"] = s.covered_voxels;
  j["obscured_voxels"] = s.obscured_voxels;
  j["total_ml"] = s.total_ml;
  j["covered_ml"] = s.covered_ml;
  j["obscured_ml"] = s.obscured_ml;
  j["obscured_fraction_pct"] = s.obscured_fraction_pct;
  return j;
}

SideReport side_from_json(const json& j) {
  SideReport s;
  s.total_voxels = j.at("total_voxels").get<std::size_t>();
  s.covered_voxels = j.at("covered_voxels").get<std::size_t>();
  s.obscured_voxels = j.at("obscured_voxels").get<std::size_t>();
  s.total_ml = j.at("total_ml").get<double>();
  s.covered_ml = j.at("covered_ml").get<double>();
  s.obscured_ml = j.at("obscured_ml").get<double>();
  s.obscured_fraction_pct = j.at("obscured_fraction_pct").get<double>();
  return s;
}

}  // namespace

Mask3D overlap_mask(const Mask3D& ct, const Mask3D& drr3d) {
  require_same(ct.geometry(), drr3d.geometry());
  Mask3D out(ct.geometry(), ct.label());
  kernels::and_into(ct.bits(), drr3d.bits(), out.mutable_bits());
  return out;
}

Mask3D obscured_mask(const Mask3D& ct, const Mask3D& drr3d) {
  require_same(ct.geometry(), drr3d.geometry());
  Mask3D out(ct.geometry(), ct.label());
  kernels::and_not_into(ct.bits(), drr3d.bits(), out.mutable_bits());
  return out;
}

double mask_volume_ml(const Mask3D& mask) {
  return static_cast<double>(mask.popcount()) * voxel_volume_ml(mask.geometry());
}

double obscured_fraction(const Mask3D& ct, const Mask2D& m2d) {
  return side_report(ct, m2d, voxel_volume_ml(ct.geometry())).obscured_fraction_pct;
}

double dice(const Mask2D& a, const Mask2D& b) {
  require_same(a, b);
  return dice_from(overlap_counts(a.bits(), b.bits()));
}

double dice(const Mask3D& a, const Mask3D& b) {
  require_same(a.geometry(), b.geometry());
  return dice_from(overlap_counts(a.bits(), b.bits()));
}

double jaccard(const Mask2D& a, const Mask2D& b) {
  require_same(a, b);
  return jaccard_from(overlap_counts(a.bits(), b.bits()));
}

double jaccard(const Mask3D& a, const Mask3D& b) {
  require_same(a.geometry(), b.geometry());
  return jaccard_from(overlap_counts(a.bits(), b.bits()));
}

const SideReport& ConcordanceReport::side(Label label) const noexcept {
  switch (label) {
    case Label::right: return right;
    case Label::left: return left;
    case Label::both: return both;
  }
  return both;
}

ConcordanceReport analyze_case(const Mask3D& ct_right, const Mask3D& ct_left, const Mask2D& m2d_right,
                               const Mask2D& m2d_left, std::string case_id) {
  const auto& g = ct_right.geometry();
  require_same(g, ct_left.geometry());
  require_coronal(m2d_right, g);
  require_coronal(m2d_left, g);

  ConcordanceReport report;
  report.case_id = std::move(case_id);
  report.voxel_ml = voxel_volume_ml(g);
  report.right = side_report(ct_right, m2d_right, report.voxel_ml);
  report.left = side_report(ct_left, m2d_left, report.voxel_ml);

  Mask3D ct_both(g, Label::both);
  kernels::or_into(ct_right.bits(), ct_left.bits(), ct_both.mutable_bits());
  Mask2D m2d_both(g.nx, g.nz, g.sx, g.sz, Label::both);
  kernels::or_into(m2d_right.bits(), m2d_left.bits(), m2d_both.mutable_bits());
  report.both = side_report(ct_both, m2d_both, report.voxel_ml);

  if (std::abs(report.right.obscured_fraction_pct - report.left.obscured_fraction_pct) > kAsymmetryFlagPoints) {
    report.flags.emplace_back("fraction_asymmetry");
  }
  auto check_silhouette = [&](const Mask3D& ct, const Mask2D& m2d, const char* flag) {
    const auto silhouette = project_mask(ct);
    const auto c = overlap_counts(silhouette.bits(), m2d.bits());
    if (c.a + c.b > 0 && dice_from(c) < kSilhouetteFlagDice) report.flags.emplace_back(flag);
  };
  check_silhouette(ct_right, m2d_right, "silhouette_mismatch_right");
  check_silhouette(ct_left, m2d_left, "silhouette_mismatch_left");
  return report;
}

std::string_view to_string(MaskKind kind) noexcept { return kind == MaskKind::ct3d ? "ct3d" : "drr2d"; }

AgreementReport agreement(const Mask2D& a, const Mask2D& b) {
  require_same(a, b);
  const auto c = overlap_counts(a.bits(), b.bits());
  return {dice_from(c), jaccard_from(c), MaskKind::drr2d, a.label()};
}

AgreementReport agreement(const Mask3D& a, const Mask3D& b) {
  require_same(a.geometry(), b.geometry());
  const auto c = overlap_counts(a.bits(), b.bits());
  return {dice_from(c), jaccard_from(c), MaskKind::ct3d, a.label()};
}

json to_json(const ConcordanceReport& report) {
  json j;
  j["case_id"] = report.case_id;
  j["voxel_ml"] = report.voxel_ml;
  for (auto label : kLabels) j[std::string(to_string(label))] = side_json(report.side(label));
  j["flags"] = report.flags;
  return j;
}

ConcordanceReport concordance_from_json(const json& doc) {
  try {
    ConcordanceReport r;
    r.case_id = doc.at("case_id").get<std::string>();
    r.voxel_ml = doc.at("voxel_ml").get<double>();
    r.right = side_from_json(doc.at("right"));
    r.left = side_from_json(doc.at("left"));
    r.both = side_from_json(doc.at("both"));
    if (doc.contains("flags")) r.flags = doc.at("flags").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedHeader, std::string("bad concordance report: ") + e.what());
  }
}

json to_json(const AgreementReport& report) {
  json j;
  j["mask_kind"] = to_string(report.mask_kind);
  j["label"] = to_string(report.label);
  j["dsc"] = report.dsc;
  j["ji"] = report.ji;
  return j;
}

std::string format_sig6(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

double round_sig6(double value) {
  const auto text = format_sig6(value);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string to_csv_rows(const ConcordanceReport& report) {
  std::string out;
  for (auto label : kLabels) {
    const auto& s = report.side(label);
    out += csv_field(report.case_id) + "," + std::string(to_string(label)) + "," + format_sig6(s.total_ml) + "," +
           format_sig6(s.covered_ml) + "," + format_sig6(s.obscured_ml) + "," +
           format_sig6(s.obscured_fraction_pct) + "\n";
  }
  return out;
}

}  // namespace lungcover
