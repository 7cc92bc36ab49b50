#pragma once

// Cohort analysis: per-case concordance for each annotator, inter-annotator
// agreement, and the summary tables.
//
// A cohort directory holds one sub-directory per case with
//   ct3d_right.json, ct3d_left.json          reference 3D masks
//   drr2d_right.json, drr2d_left.json        annotator 1 contour masks
//   drr2d_right_a2.json, drr2d_left_a2.json  annotator 2 (optional)
//   ct3d_right_a2.json, ct3d_left_a2.json    second 3D segmentation (optional)
// Cases are listed by manifest.json when present, otherwise every case_*
// sub-directory in name order.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lungcover/concordance.hpp"
#include "lungcover/stats.hpp"

namespace lungcover::cohort {

struct CaseEntry {
  std::string case_id;
  std::filesystem::path dir;
};

/// Throws Error(IoFailure) when the directory is missing and
/// Error(EmptyInput) when it contains no cases.
std::vector<CaseEntry> discover_cases(const std::filesystem::path& cohort_dir);

struct CaseResult {
  std::string case_id;
  double pixel_spacing_mm = 0.0;
  std::size_t slices = 0;
  double scan_length_mm = 0.0;
  ConcordanceReport annotator1;
  std::optional<ConcordanceReport> annotator2;
  std::vector<AgreementReport> agreement;  // drr2d per label, then ct3d when present
};

CaseResult analyze_case_dir(const CaseEntry& entry);

/// Outcome of one paired comparison in a table row. `error` is set instead
/// of `comparison` when no test could be computed.
struct TestOutcome {
  std::optional<stats::PairedComparison> comparison;
  std::optional<std::string> error;
};

struct Table3Row {
  int annotator = 1;
  Label label = Label::both;
  stats::DescriptiveSummary ct_ml;
  stats::DescriptiveSummary drr_ml;
  TestOutcome test;
};

struct Table4Row {
  Label label = Label::both;
  stats::DescriptiveSummary annotator1_pct;
  stats::DescriptiveSummary annotator2_pct;
  TestOutcome test;
};

struct Table2Row {
  MaskKind mask_kind = MaskKind::drr2d;
  Label label = Label::both;
  std::size_t n = 0;
  stats::QuartileSummary dsc;
  stats::QuartileSummary ji;
};

struct CohortSummary {
  std::vector<CaseResult> cases;
  stats::DescriptiveSummary pixel_spacing_mm, slices, scan_length_mm;
  std::vector<Table2Row> table2;
  std::vector<Table3Row> table3;
  std::vector<Table4Row> table4;
};

CohortSummary summarize(std::vector<CaseResult> cases);
nlohmann::ordered_json to_json(const CohortSummary& summary);

/// Analyzes every case and writes cohort_report.json, cases.csv,
/// cases_a2.csv (when annotator 2 exists) and table1..table4 CSVs into
/// `out_dir`. Returns the summary.
CohortSummary run_cohort(const std::filesystem::path& cohort_dir, const std::filesystem::path& out_dir);

}  // namespace lungcover::cohort
