// lungcover command-line interface.
//
// Exit status: 0 on success, 2 on I/O failure, 1 on any other error. Errors
// are reported on stderr as one JSON line {"error": <code>, "message": ...}.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lungcover/cohort.hpp"
#include "lungcover/concordance.hpp"
#include "lungcover/error.hpp"
#include "lungcover/io.hpp"
#include "lungcover/phantom.hpp"
#include "lungcover/projection.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace lungcover;

namespace {

int report_error(std::string_view code, std::string_view message, int status) {
  std::cerr << ordered_json{{"error", code}, {"message", message}}.dump() << "\n";
  return status;
}

void emit_json(const ordered_json& doc, const std::string& out) {
  const auto text = doc.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    io::write_file_atomic(out, text);
  }
}

struct PhantomArgs {
  std::string spec = "default";
  std::size_t n = 1;
  std::uint64_t seed = 0;
  double perturbation = phantom::kDefaultPerturbation;
  std::string out;
  bool quiet = false;
};

void run_phantom(const PhantomArgs& a) {
  phantom::PhantomSpec base = a.spec == "default"
                                  ? phantom::default_phantom_spec(phantom::default_geometry())
                                  : [&] {
                                      ordered_json doc;
                                      const auto text = io::read_text(a.spec);
                                      try {
                                        doc = ordered_json::parse(text);
                                      } catch (const ordered_json::exception& e) {
                                        throw Error(ErrorCode::MalformedHeader, std::string("bad spec JSON: ") + e.what());
                                      }
                                      return phantom::spec_from_json(doc);
                                    }();
  const auto manifest = phantom::write_cohort(base, a.n, a.seed, a.perturbation, a.out);
  if (!a.quiet) std::cout << manifest.string() << "\n";
}

struct DrrArgs {
  std::string volume, out;
  double lo = 0.0, hi = 0.0;
};

void run_drr(const DrrArgs& a) {
  const WindowSpec window(a.lo, a.hi);
  io::write_pgm(render_drr(io::load_volume(a.volume), window), a.out);
}

struct AnalyzeArgs {
  std::string ct_right, ct_left, mask_right, mask_left, case_id, out, csv;
};

void run_analyze(const AnalyzeArgs& a) {
  const auto report = analyze_case(io::load_mask3d(a.ct_right), io::load_mask3d(a.ct_left),
                                   io::load_mask2d(a.mask_right), io::load_mask2d(a.mask_left), a.case_id);
  if (!a.csv.empty()) {
    std::string text = fs::exists(a.csv) ? io::read_text(a.csv) : std::string(kConcordanceCsvHeader) + "\n";
    if (!text.empty() && text.back() != '\n') text += '\n';
    io::write_file_atomic(a.csv, text + to_csv_rows(report));
  }
  emit_json(to_json(report), a.out);
}

struct AgreementArgs {
  std::string a, b, out;
};

void run_agreement(const AgreementArgs& a) {
  const int ra = io::header_rank(a.a);
  const int rb = io::header_rank(a.b);
  if (ra != rb) {
    throw Error(ErrorCode::GeometryMismatch,
                "cannot compare a " + std::to_string(ra) + "D mask with a " + std::to_string(rb) + "D mask");
  }
  const auto report = ra == 2 ? agreement(io::load_mask2d(a.a), io::load_mask2d(a.b))
                              : agreement(io::load_mask3d(a.a), io::load_mask3d(a.b));
  emit_json(to_json(report), a.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage of 3D lung volume by 2D radiograph-style lung masks"};
  app.require_subcommand(1);

  PhantomArgs pa;
  auto* ph = app.add_subcommand("phantom", "Generate a synthetic cohort with ground truth");
  ph->add_option("--spec", pa.spec, "'default' or a spec JSON file")->capture_default_str();
  ph->add_option("--n", pa.n, "Number of cases")->capture_default_str()->check(CLI::PositiveNumber);
  ph->add_option("--seed", pa.seed, "Cohort seed")->capture_default_str();
  ph->add_option("--perturbation", pa.perturbation, "Relative size perturbation per axis")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 0.95));
  ph->add_option("--out", pa.out, "Output directory")->required();
  ph->add_flag("--quiet", pa.quiet, "Do not print the manifest path");

  DrrArgs da;
  auto* drr = app.add_subcommand("drr", "Render a DRR from a volume");
  drr->add_option("--volume", da.volume, "Volume header JSON")->required();
  drr->add_option("--window-lo", da.lo, "Window lower bound (HU)")->required();
  drr->add_option("--window-hi", da.hi, "Window upper bound (HU)")->required();
  drr->add_option("--out", da.out, "Output PGM")->required();

  AnalyzeArgs aa;
  auto* an = app.add_subcommand("analyze", "Covered/obscured analysis of one case");
  an->add_option("--ct-right", aa.ct_right, "Right lung 3D mask")->required();
  an->add_option("--ct-left", aa.ct_left, "Left lung 3D mask")->required();
  an->add_option("--mask-right", aa.mask_right, "Right lung 2D mask")->required();
  an->add_option("--mask-left", aa.mask_left, "Left lung 2D mask")->required();
  an->add_option("--case-id", aa.case_id, "Case identifier")->required();
  an->add_option("--out", aa.out, "Report JSON (stdout when omitted)");
  an->add_option("--csv", aa.csv, "CSV file to append rows to");

  AgreementArgs ga;
  auto* ag = app.add_subcommand("agreement", "Dice and Jaccard between two masks");
  ag->add_option("--a", ga.a, "First mask")->required();
  ag->add_option("--b", ga.b, "Second mask")->required();
  ag->add_option("--out", ga.out, "Report JSON (stdout when omitted)");

  std::string cohort_dir, cohort_out;
  auto* co = app.add_subcommand("cohort", "Analyze a cohort directory and write summary tables");
  co->add_option("--cohort", cohort_dir, "Cohort directory")->required();
  co->add_option("--out", cohort_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("InvalidArgument", e.what(), 1);
  }

  try {
    if (*ph) run_phantom(pa);
    if (*drr) run_drr(da);
    if (*an) run_analyze(aa);
    if (*ag) run_agreement(ga);
    if (*co) cohort::run_cohort(cohort_dir, cohort_out);
  } catch (const Error& e) {
    return report_error(to_string(e.code()), e.what(), e.code() == ErrorCode::IoFailure ? 2 : 1);
  } catch (const fs::filesystem_error& e) {
    return report_error("IoFailure", e.what(), 2);
  } catch (const std::exception& e) {
    return report_error("Internal", e.what(), 1);
  }
  return 0;
}
