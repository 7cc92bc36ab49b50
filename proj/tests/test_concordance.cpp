#include <gtest/gtest.h>

#include <algorithm>

#include "lungcover/concordance.hpp"
#include "lungcover/error.hpp"
#include "lungcover/projection.hpp"
#include "test_support.hpp"

using namespace lungcover;

namespace {

// 4 x 2 x 3 grid; right lung occupies x in {0,1}, left lung x in {2,3}.
struct TwoLungs {
  GridGeometry g{4, 2, 3, 2.0, 2.5, 2.0};  // 10 mm^3 voxels
  Mask3D right{g, Label::right};
  Mask3D left{g, Label::left};
  TwoLungs() {
    for (std::size_t z = 0; z < 3; ++z)
      for (std::size_t y = 0; y < 2; ++y) {
        right.set(0, y, z);
        right.set(1, y, z);
        left.set(2, y, z);
        left.set(3, y, z);
      }
  }
};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected lungcover::Error";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Concordance, HalfCoveredColumn) {
  TwoLungs t;
  Mask2D mr(4, 3, 2.0, 2.0, Label::right);
  Mask2D ml(4, 3, 2.0, 2.0, Label::left);
  // Right: cover x=0 only -> half covered. Left: cover everything.
  for (std::size_t z = 0; z < 3; ++z) {
    mr.set(0, z);
    ml.set(2, z);
    ml.set(3, z);
  }
  const auto r = analyze_case(t.right, t.left, mr, ml, "c1");
  EXPECT_EQ(r.right.total_voxels, 12u);
  EXPECT_EQ(r.right.covered_voxels, 6u);
  EXPECT_DOUBLE_EQ(r.right.obscured_fraction_pct, 50.0);
  EXPECT_DOUBLE_EQ(r.left.obscured_fraction_pct, 0.0);
  EXPECT_DOUBLE_EQ(r.both.obscured_fraction_pct, 25.0);
  EXPECT_DOUBLE_EQ(r.voxel_ml, 0.01);
  EXPECT_DOUBLE_EQ(r.right.total_ml, 0.12);
  // 50 vs 0 percentage points.
  EXPECT_NE(std::find(r.flags.begin(), r.flags.end(), "fraction_asymmetry"), r.flags.end());
}

TEST(Concordance, SwappedMasksAreFlagged) {
  TwoLungs t;
  const auto pr = project_mask(t.right);
  const auto pl = project_mask(t.left);
  const auto ok = analyze_case(t.right, t.left, pr, pl, "ok");
  EXPECT_TRUE(ok.flags.empty());
  const auto swapped = analyze_case(t.right, t.left, pl, pr, "swapped");
  EXPECT_NE(std::find(swapped.flags.begin(), swapped.flags.end(), "silhouette_mismatch_right"), swapped.flags.end());
  EXPECT_NE(std::find(swapped.flags.begin(), swapped.flags.end(), "silhouette_mismatch_left"), swapped.flags.end());
  EXPECT_DOUBLE_EQ(swapped.right.obscured_fraction_pct, 100.0);
}

TEST(Concordance, Errors) {
  TwoLungs t;
  const auto pr = project_mask(t.right);
  const Mask2D wrong(5, 3, 2.0, 2.0, Label::right);
  EXPECT_EQ(code_of([&] { analyze_case(t.right, t.left, wrong, pr, "x"); }), ErrorCode::GeometryMismatch);
  const Mask3D empty(t.g, Label::left);
  EXPECT_EQ(code_of([&] { analyze_case(t.right, empty, pr, pr, "x"); }), ErrorCode::EmptyReference);
  const Mask2D e2(4, 3, 2.0, 2.0, Label::right);
  EXPECT_EQ(code_of([&] { dice(e2, e2); }), ErrorCode::BothEmpty);
  EXPECT_EQ(code_of([&] { jaccard(e2, e2); }), ErrorCode::BothEmpty);
  EXPECT_EQ(code_of([&] { overlap_mask(t.right, Mask3D(GridGeometry(4, 2, 2, 1, 1, 1), Label::right)); }),
            ErrorCode::GeometryMismatch);
}

TEST(Concordance, DiceJaccardExamples) {
  Mask2D a(4, 1, 1, 1, Label::both), b(4, 1, 1, 1, Label::both);
  a.set(0, 0);
  a.set(1, 0);
  b.set(1, 0);
  b.set(2, 0);
  EXPECT_DOUBLE_EQ(dice(a, b), 0.5);
  EXPECT_DOUBLE_EQ(jaccard(a, b), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(dice(a, a), 1.0);
  const Mask2D empty(4, 1, 1, 1, Label::both);
  EXPECT_DOUBLE_EQ(dice(a, empty), 0.0);
  const auto rep = agreement(a, b);
  EXPECT_EQ(rep.mask_kind, MaskKind::drr2d);
  EXPECT_DOUBLE_EQ(rep.ji, rep.dsc / (2.0 - rep.dsc));
}

TEST(Concordance, RandomPropertiesHold) {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const GridGeometry g(1 + rng.below(9), 1 + rng.below(9), 1 + rng.below(9), 1.0, 1.5, 2.0);
    auto ct = testsupport::random_mask3d(g, 0.5, rng);
    ct.set(0, 0, 0);
    const auto m2 = testsupport::random_mask2d(g.nx, g.nz, g.sx, g.sz, rng.uniform(), rng);
    const auto drr3d = extrude_mask(m2, g.ny, g.sy);
    const auto cov = overlap_mask(ct, drr3d);
    const auto obs = obscured_mask(ct, drr3d);
    ASSERT_EQ(cov.popcount() + obs.popcount(), ct.popcount());
    const double f = obscured_fraction(ct, m2);
    ASSERT_GE(f, 0.0);
    ASSERT_LE(f, 100.0);
    ASSERT_NEAR(mask_volume_ml(cov) + mask_volume_ml(obs), mask_volume_ml(ct), 1e-9);
  }
}

TEST(Concordance, ReportJsonRoundTrip) {
  TwoLungs t;
  const auto r = analyze_case(t.right, t.left, project_mask(t.right), project_mask(t.left), "c,1");
  const auto back = concordance_from_json(to_json(r));
  EXPECT_EQ(back.case_id, r.case_id);
  EXPECT_EQ(back.both.covered_voxels, r.both.covered_voxels);
  EXPECT_EQ(back.right.obscured_fraction_pct, r.right.obscured_fraction_pct);
  EXPECT_THROW(concordance_from_json(nlohmann::ordered_json{{"case_id", 3}}), Error);
}

TEST(Concordance, CsvRowsQuoteAndFormat) {
  TwoLungs t;
  const auto r = analyze_case(t.right, t.left, project_mask(t.right), project_mask(t.left), "c,1");
  const auto rows = to_csv_rows(r);
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 3);
  EXPECT_EQ(rows.rfind("\"c,1\",right,0.12,0.12,0,0\n", 0), 0u) << rows;
}

TEST(Format, SixSignificantDigits) {
  EXPECT_EQ(format_sig6(0.1234567), "0.123457");
  EXPECT_EQ(format_sig6(1234567.0), "1.23457e+06");
  EXPECT_EQ(format_sig6(25.0), "25");
  EXPECT_EQ(round_sig6(0.1234567), 0.123457);
  EXPECT_EQ(csv_field("a\"b"), "\"a\"\"b\"");
  EXPECT_EQ(csv_field("plain"), "plain");
}
