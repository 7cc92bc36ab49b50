#include "lungcover/cohort.hpp"

#include <algorithm>

#include "lungcover/error.hpp"
#include "lungcover/io.hpp"
#include "lungcover/kernels.hpp"

namespace lungcover::cohort {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

Mask2D union2d(const Mask2D& r, const Mask2D& l) {
  Mask2D out(r.nx(), r.nz(), r.sx(), r.sz(), Label::both);
  kernels::or_into(r.bits(), l.bits(), out.mutable_bits());
  return out;
}

Mask3D union3d(const Mask3D& r, const Mask3D& l) {
  Mask3D out(r.geometry(), Label::both);
  kernels::or_into(r.bits(), l.bits(), out.mutable_bits());
  return out;
}

std::vector<AgreementReport> agreement_by_label(const Mask2D& ar, const Mask2D& al, const Mask2D& br,
                                                const Mask2D& bl) {
  auto both = agreement(union2d(ar, al), union2d(br, bl));
  return {agreement(ar, br), agreement(al, bl), both};
}

std::vector<AgreementReport> agreement_by_label(const Mask3D& ar, const Mask3D& al, const Mask3D& br,
                                                const Mask3D& bl) {
  auto both = agreement(union3d(ar, al), union3d(br, bl));
  return {agreement(ar, br), agreement(al, bl), both};
}

TestOutcome run_test(const std::vector<double>& xs, const std::vector<double>& ys) {
  try {
    return {stats::compare_paired(xs, ys), std::nullopt};
  } catch (const Error& e) {
    return {std::nullopt, std::string(to_string(e.code())) + ": " + e.what()};
  }
}

std::string num(double v) { return format_sig6(v); }
std::string num(const std::optional<double>& v) { return v ? format_sig6(*v) : std::string(); }

std::string summary_fields(const stats::DescriptiveSummary& s) {
  return num(s.mean) + "," + num(s.sd) + "," + num(s.min) + "," + num(s.max);
}

std::string quartile_fields(const stats::QuartileSummary& q) {
  return num(q.median) + "," + num(q.q1) + "," + num(q.q3) + "," + num(q.min) + "," + num(q.max);
}

std::string test_fields(const TestOutcome& t) {
  if (!t.comparison) return "," + csv_field("error: " + *t.error) + ",";
  const auto& c = *t.comparison;
  return num(c.test.p_value) + "," + std::string(stats::to_string(c.test.test_name)) + "," +
         (c.normality ? num(c.normality->p_value) : std::string());
}

ordered_json summary_json(const stats::DescriptiveSummary& s) {
  return {{"n", s.n},
          {"mean", s.mean},
          {"sd", s.sd ? ordered_json(*s.sd) : ordered_json(nullptr)},
          {"min", s.min},
          {"max", s.max}};
}

ordered_json quartile_json(const stats::QuartileSummary& q) {
  return {{"median", q.median}, {"q1", q.q1}, {"q3", q.q3}, {"min", q.min}, {"max", q.max}};
}

ordered_json result_json(const stats::TestResult& r) {
  return {{"test_name", stats::to_string(r.test_name)}, {"statistic", r.statistic}, {"p_value", r.p_value}, {"n", r.n}};
}

ordered_json test_json(const TestOutcome& t) {
  if (!t.comparison) return {{"error", *t.error}};
  const auto& c = *t.comparison;
  ordered_json j = result_json(c.test);
  j["normality"] = c.normality ? result_json(*c.normality) : ordered_json(nullptr);
  j["decision_rule_note"] = c.decision_rule_note;
  return j;
}

std::string cases_csv(const std::vector<CaseResult>& cases, bool second) {
  std::string out = std::string(kConcordanceCsvHeader) + "\n";
  for (const auto& c : cases) out += to_csv_rows(second ? *c.annotator2 : c.annotator1);
  return out;
}

}  // namespace

std::vector<CaseEntry> discover_cases(const fs::path& cohort_dir) {
  if (!fs::is_directory(cohort_dir)) {
    throw Error(ErrorCode::IoFailure, "cohort directory not found: " + cohort_dir.string());
  }
  std::vector<CaseEntry> out;
  const auto manifest = cohort_dir / "manifest.json";
  if (fs::exists(manifest)) {
    ordered_json doc;
    try {
      doc = ordered_json::parse(io::read_text(manifest));
      for (const auto& c : doc.at("cases")) {
        out.push_back({c.at("case_id").get<std::string>(), cohort_dir / c.at("dir").get<std::string>()});
      }
    } catch (const ordered_json::exception& e) {
      throw Error(ErrorCode::MalformedHeader, std::string("bad cohort manifest: ") + e.what());
    }
  } else {
    for (const auto& d : fs::directory_iterator(cohort_dir)) {
      const auto name = d.path().filename().string();
      if (d.is_directory() && name.starts_with("case_")) out.push_back({name, d.path()});
    }
    std::sort(out.begin(), out.end(), [](const CaseEntry& a, const CaseEntry& b) { return a.case_id < b.case_id; });
  }
  if (out.empty()) throw Error(ErrorCode::EmptyInput, "no cases in " + cohort_dir.string());
  return out;
}

CaseResult analyze_case_dir(const CaseEntry& entry) {
  const auto& d = entry.dir;
  const auto ct_r = io::load_mask3d(d / "ct3d_right.json");
  const auto ct_l = io::load_mask3d(d / "ct3d_left.json");
  const auto a1_r = io::load_mask2d(d / "drr2d_right.json");
  const auto a1_l = io::load_mask2d(d / "drr2d_left.json");

  CaseResult out;
  out.case_id = entry.case_id;
  const auto& g = ct_r.geometry();
  out.pixel_spacing_mm = g.sx;
  out.slices = g.nz;
  out.scan_length_mm = static_cast<double>(g.nz) * g.sz;
  out.annotator1 = analyze_case(ct_r, ct_l, a1_r, a1_l, entry.case_id);

  if (fs::exists(d / "drr2d_right_a2.json") && fs::exists(d / "drr2d_left_a2.json")) {
    const auto a2_r = io::load_mask2d(d / "drr2d_right_a2.json");
    const auto a2_l = io::load_mask2d(d / "drr2d_left_a2.json");
    out.annotator2 = analyze_case(ct_r, ct_l, a2_r, a2_l, entry.case_id);
    out.agreement = agreement_by_label(a1_r, a1_l, a2_r, a2_l);
  }
  if (fs::exists(d / "ct3d_right_a2.json") && fs::exists(d / "ct3d_left_a2.json")) {
    const auto b_r = io::load_mask3d(d / "ct3d_right_a2.json");
    const auto b_l = io::load_mask3d(d / "ct3d_left_a2.json");
    for (auto& a : agreement_by_label(ct_r, ct_l, b_r, b_l)) out.agreement.push_back(a);
  }
  return out;
}

CohortSummary summarize(std::vector<CaseResult> cases) {
  if (cases.empty()) throw Error(ErrorCode::EmptyInput, "no cases to summarize");
  CohortSummary s;
  s.cases = std::move(cases);
  const auto& cs = s.cases;

  std::vector<double> spacing, slices, length;
  for (const auto& c : cs) {
    spacing.push_back(round_sig6(c.pixel_spacing_mm));
    slices.push_back(static_cast<double>(c.slices));
    length.push_back(round_sig6(c.scan_length_mm));
  }
  s.pixel_spacing_mm = stats::describe(spacing);
  s.slices = stats::describe(slices);
  s.scan_length_mm = stats::describe(length);

  // Agreement rows only use cases that carry both masks of that kind.
  for (const auto kind : {MaskKind::drr2d, MaskKind::ct3d}) {
    for (const auto label : kLabels) {
      std::vector<double> dsc, ji;
      for (const auto& c : cs) {
        for (const auto& a : c.agreement) {
          if (a.mask_kind == kind && a.label == label) {
            dsc.push_back(a.dsc);
            ji.push_back(a.ji);
          }
        }
      }
      if (dsc.empty()) continue;
      s.table2.push_back({kind, label, dsc.size(), stats::describe_quartiles(dsc), stats::describe_quartiles(ji)});
    }
  }

  const bool have_a2 = std::all_of(cs.begin(), cs.end(), [](const CaseResult& c) { return c.annotator2.has_value(); });
  for (int annotator = 1; annotator <= (have_a2 ? 2 : 1); ++annotator) {
    for (const auto label : kLabels) {
      std::vector<double> ct, drr;
      for (const auto& c : cs) {
        const auto& side = (annotator == 1 ? c.annotator1 : *c.annotator2).side(label);
        ct.push_back(round_sig6(side.total_ml));
        drr.push_back(round_sig6(side.covered_ml));
      }
      s.table3.push_back({annotator, label, stats::describe(ct), stats::describe(drr), run_test(ct, drr)});
    }
  }
  if (have_a2) {
    for (const auto label : kLabels) {
      std::vector<double> f1, f2;
      for (const auto& c : cs) {
        f1.push_back(round_sig6(c.annotator1.side(label).obscured_fraction_pct));
        f2.push_back(round_sig6(c.annotator2->side(label).obscured_fraction_pct));
      }
      s.table4.push_back({label, stats::describe(f1), stats::describe(f2), run_test(f1, f2)});
    }
  }
  return s;
}

ordered_json to_json(const CohortSummary& s) {
  ordered_json cases = ordered_json::array();
  for (const auto& c : s.cases) {
    ordered_json agreement = ordered_json::array();
    for (const auto& a : c.agreement) agreement.push_back(lungcover::to_json(a));
    cases.push_back({{"case_id", c.case_id},
                     {"annotator1", lungcover::to_json(c.annotator1)},
                     {"annotator2", c.annotator2 ? lungcover::to_json(*c.annotator2) : ordered_json(nullptr)},
                     {"agreement", agreement}});
  }
  ordered_json t2 = ordered_json::array();
  for (const auto& r : s.table2) {
    t2.push_back({{"mask_kind", to_string(r.mask_kind)},
                  {"label", to_string(r.label)},
                  {"n", r.n},
                  {"dsc", quartile_json(r.dsc)},
                  {"ji", quartile_json(r.ji)}});
  }
  ordered_json t3 = ordered_json::array();
  for (const auto& r : s.table3) {
    t3.push_back({{"annotator", r.annotator},
                  {"label", to_string(r.label)},
                  {"ct_ml", summary_json(r.ct_ml)},
                  {"drr_ml", summary_json(r.drr_ml)},
                  {"test", test_json(r.test)}});
  }
  ordered_json t4 = ordered_json::array();
  for (const auto& r : s.table4) {
    t4.push_back({{"label", to_string(r.label)},
                  {"annotator1_pct", summary_json(r.annotator1_pct)},
                  {"annotator2_pct", summary_json(r.annotator2_pct)},
                  {"test", test_json(r.test)}});
  }
  return {{"n_cases", s.cases.size()},
          {"table1",
           {{"pixel_spacing_mm", summary_json(s.pixel_spacing_mm)},
            {"number_of_slices", summary_json(s.slices)},
            {"scan_length_mm", summary_json(s.scan_length_mm)}}},
          {"table2_agreement", t2},
          {"table3_volumes", t3},
          {"table4_fractions", t4},
          {"cases", cases}};
}

CohortSummary run_cohort(const fs::path& cohort_dir, const fs::path& out_dir) {
  std::vector<CaseResult> results;
  for (const auto& entry : discover_cases(cohort_dir)) results.push_back(analyze_case_dir(entry));
  auto s = summarize(std::move(results));

  fs::create_directories(out_dir);
  io::write_file_atomic(out_dir / "cohort_report.json", to_json(s).dump(2) + "\n");
  io::write_file_atomic(out_dir / "cases.csv", cases_csv(s.cases, false));
  if (!s.table4.empty()) io::write_file_atomic(out_dir / "cases_a2.csv", cases_csv(s.cases, true));

  std::string t1 = "variable,mean,sd,min,max\n";
  t1 += "pixel_spacing_mm," + summary_fields(s.pixel_spacing_mm) + "\n";
  t1 += "number_of_slices," + summary_fields(s.slices) + "\n";
  t1 += "scan_length_mm," + summary_fields(s.scan_length_mm) + "\n";
  io::write_file_atomic(out_dir / "table1_dataset.csv", t1);

  std::string t2 =
      "mask_kind,label,n,dsc_median,dsc_q1,dsc_q3,dsc_min,dsc_max,ji_median,ji_q1,ji_q3,ji_min,ji_max\n";
  for (const auto& r : s.table2) {
    t2 += std::string(to_string(r.mask_kind)) + "," + std::string(to_string(r.label)) + "," + std::to_string(r.n) +
          "," + quartile_fields(r.dsc) + "," + quartile_fields(r.ji) + "\n";
  }
  io::write_file_atomic(out_dir / "table2_agreement.csv", t2);

  std::string t3 =
      "annotator,label,n,ct_mean_ml,ct_sd_ml,ct_min_ml,ct_max_ml,drr_mean_ml,drr_sd_ml,drr_min_ml,drr_max_ml,"
      "p_value,test,normality_p\n";
  for (const auto& r : s.table3) {
    t3 += std::to_string(r.annotator) + "," + std::string(to_string(r.label)) + "," + std::to_string(r.ct_ml.n) + "," +
          summary_fields(r.ct_ml) + "," + summary_fields(r.drr_ml) + "," + test_fields(r.test) + "\n";
  }
  io::write_file_atomic(out_dir / "table3_volumes.csv", t3);

  std::string t4 =
      "label,n,a1_mean_pct,a1_sd_pct,a1_min_pct,a1_max_pct,a2_mean_pct,a2_sd_pct,a2_min_pct,a2_max_pct,"
      "p_value,test,normality_p\n";
  for (const auto& r : s.table4) {
    t4 += std::string(to_string(r.label)) + "," + std::to_string(r.annotator1_pct.n) + "," +
          summary_fields(r.annotator1_pct) + "," + summary_fields(r.annotator2_pct) + "," + test_fields(r.test) + "\n";
  }
  io::write_file_atomic(out_dir / "table4_fractions.csv", t4);
  return s;
}

}  // namespace lungcover::cohort
