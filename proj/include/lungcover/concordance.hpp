#pragma once

// Covered/obscured partition of a 3D lung mask against a contour-style 2D
// mask, volumes in ml, and Dice/Jaccard agreement.
//
// Counts are kept as integers throughout; conversion to ml happens once, at
// the end, by multiplying by voxel_volume_ml.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "lungcover/grid.hpp"

namespace lungcover {

Mask3D overlap_mask(const Mask3D& ct, const Mask3D& drr3d);
Mask3D obscured_mask(const Mask3D& ct, const Mask3D& drr3d);

double mask_volume_ml(const Mask3D& mask);

/// Percentage of `ct` voxels outside the extrusion of `m2d`.
double obscured_fraction(const Mask3D& ct, const Mask2D& m2d);

double dice(const Mask2D& a, const Mask2D& b);
double dice(const Mask3D& a, const Mask3D& b);
double jaccard(const Mask2D& a, const Mask2D& b);
double jaccard(const Mask3D& a, const Mask3D& b);

struct SideReport {
  std::size_t total_voxels = 0;
  std::size_t covered_voxels = 0;
  std::size_t obscured_voxels = 0;
  double total_ml = 0.0;
  double covered_ml = 0.0;
  double obscured_ml = 0.0;
  double obscured_fraction_pct = 0.0;
};

struct ConcordanceReport {
  std::string case_id;
  double voxel_ml = 0.0;
  SideReport right, left, both;
  /// Plausibility warnings, e.g. "fraction_asymmetry" or
  /// "silhouette_mismatch_right" for masks that look swapped.
  std::vector<std::string> flags;

  const SideReport& side(Label label) const noexcept;
};

/// Fraction difference (percentage points) above which a report is flagged
/// as asymmetric.
inline constexpr double kAsymmetryFlagPoints = 25.0;
/// Silhouette Dice below which a 2D mask is flagged as not matching its lung.
inline constexpr double kSilhouetteFlagDice = 0.5;

/// Right, left and both-lung analysis. "Both" ORs the sides in 3D and in 2D
/// before counting, so its fraction is volume weighted.
ConcordanceReport analyze_case(const Mask3D& ct_right, const Mask3D& ct_left, const Mask2D& m2d_right,
                               const Mask2D& m2d_left, std::string case_id);

enum class MaskKind { ct3d, drr2d };
std::string_view to_string(MaskKind kind) noexcept;

struct AgreementReport {
  double dsc = 0.0;
  double ji = 0.0;
  MaskKind mask_kind = MaskKind::drr2d;
  Label label = Label::both;
};

AgreementReport agreement(const Mask2D& a, const Mask2D& b);
AgreementReport agreement(const Mask3D& a, const Mask3D& b);

inline constexpr std::array<Label, 3> kLabels{Label::right, Label::left, Label::both};

nlohmann::ordered_json to_json(const ConcordanceReport& report);
ConcordanceReport concordance_from_json(const nlohmann::ordered_json& doc);
nlohmann::ordered_json to_json(const AgreementReport& report);

inline constexpr const char* kConcordanceCsvHeader =
    "case_id,label,total_ml,covered_ml,obscured_ml,obscured_fraction_pct";
/// Three RFC-4180 rows (right, left, both), each terminated by "\n".
std::string to_csv_rows(const ConcordanceReport& report);

/// Six significant digits, '.' decimal, locale independent.
std::string format_sig6(double value);
/// The value a reader of format_sig6 output recovers.
double round_sig6(double value);
/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

}  // namespace lungcover
