#include <gtest/gtest.h>

#include "lungcover/error.hpp"
#include "lungcover/kernels.hpp"
#include "lungcover/projection.hpp"
#include "test_support.hpp"

using namespace lungcover;

TEST(Window, RejectsEmptyOrInvertedRange) {
  EXPECT_THROW(WindowSpec(0.0, 0.0), Error);
  EXPECT_THROW(WindowSpec(10.0, -10.0), Error);
  EXPECT_THROW(WindowSpec(0.0, std::numeric_limits<double>::infinity()), Error);
  EXPECT_NO_THROW(WindowSpec(-1.0, 1.0));
}

TEST(Drr, ColumnMeanIsWindowed) {
  // Column (0,0) holds -1000 and 200 -> mean -400 -> 255 * 0.5 = 127.5 -> 128.
  const GridGeometry g(2, 2, 1, 1, 1, 1);
  const VoxelVolume v(g, std::vector<std::int16_t>{-1000, 3071, 200, 3071});
  const auto img = render_drr(v, WindowSpec{});
  EXPECT_EQ(img.nx(), 2u);
  EXPECT_EQ(img.nz(), 1u);
  EXPECT_EQ(img.at(0, 0), 128);
  EXPECT_EQ(img.at(1, 0), 255);
}

TEST(Drr, ClampsBelowAndAboveWindow) {
  const GridGeometry g(3, 1, 1, 1, 1, 1);
  const VoxelVolume v(g, std::vector<std::int16_t>{-1024, -1000, 200});
  const auto img = render_drr(v, WindowSpec(-1000.0, 200.0));
  EXPECT_EQ(img.at(0, 0), 0);
  EXPECT_EQ(img.at(1, 0), 0);
  EXPECT_EQ(img.at(2, 0), 255);
}

TEST(Drr, RowsFollowZ) {
  const GridGeometry g(1, 1, 3, 1, 1, 1);
  const VoxelVolume v(g, std::vector<std::int16_t>{-1000, -400, 200});
  const auto img = render_drr(v, WindowSpec{});
  EXPECT_EQ(img.at(0, 0), 0);
  EXPECT_EQ(img.at(0, 1), 128);
  EXPECT_EQ(img.at(0, 2), 255);
}

TEST(Drr, UniformVolumeGivesUniformImage) {
  const GridGeometry g(4, 7, 3, 1, 1, 1);
  for (std::int16_t hu : {-1000, -700, 0, 200}) {
    const auto img = render_drr(VoxelVolume(g, hu), WindowSpec{});
    const auto expected = kernels::window_pixel(hu, -1000.0, 200.0);
    for (auto p : img.pixels()) ASSERT_EQ(p, expected);
  }
}

TEST(MaskTransforms, ProjectIsColumnOr) {
  const GridGeometry g(2, 3, 2, 1, 2, 3);
  Mask3D m(g, Label::left);
  m.set(1, 2, 0);
  m.set(0, 0, 1);
  m.set(0, 1, 1);
  const auto p = project_mask(m);
  EXPECT_EQ(p.label(), Label::left);
  EXPECT_TRUE(p.matches_coronal(g));
  EXPECT_FALSE(p.at(0, 0));
  EXPECT_TRUE(p.at(1, 0));
  EXPECT_TRUE(p.at(0, 1));
  EXPECT_FALSE(p.at(1, 1));
}

TEST(MaskTransforms, ExtrudeReplicatesAlongY) {
  Mask2D m(3, 2, 0.5, 2.0, Label::right);
  m.set(2, 1);
  const auto e = extrude_mask(m, 4, 1.5);
  EXPECT_EQ(e.geometry(), GridGeometry(3, 4, 2, 0.5, 1.5, 2.0));
  for (std::size_t y = 0; y < 4; ++y) {
    EXPECT_TRUE(e.at(2, y, 1));
    EXPECT_FALSE(e.at(1, y, 1));
  }
  EXPECT_EQ(e.popcount(), 4u);
}

TEST(MaskTransforms, ProjectOfExtrudeIsIdentity) {
  Rng rng(5);
  for (std::size_t ny : {1u, 2u, 9u}) {
    const auto m = testsupport::random_mask2d(6, 5, 1.0, 1.0, 0.5, rng);
    EXPECT_EQ(project_mask(extrude_mask(m, ny, 1.0)), m);
  }
}

class KernelParity : public ::testing::TestWithParam<std::size_t> {};

TEST_P(KernelParity, ParallelMatchesReference) {
  const std::size_t n = GetParam();
  Rng rng(1000 + n);
  std::vector<std::uint8_t> a(n), b(n);
  for (auto& v : a) v = rng.uniform() < 0.3;
  for (auto& v : b) v = rng.uniform() < 0.6;
  EXPECT_EQ(kernels::count_set(a), kernels::reference::count_set(a));
  EXPECT_EQ(kernels::count_and(a, b), kernels::reference::count_and(a, b));
  EXPECT_EQ(kernels::count_or(a, b), kernels::reference::count_or(a, b));

  std::vector<std::uint8_t> p(n), q(n);
  kernels::and_into(a, b, p);
  kernels::reference::and_into(a, b, q);
  EXPECT_EQ(p, q);
  kernels::and_not_into(a, b, p);
  kernels::reference::and_not_into(a, b, q);
  EXPECT_EQ(p, q);
  kernels::or_into(a, b, p);
  kernels::reference::or_into(a, b, q);
  EXPECT_EQ(p, q);
}

INSTANTIATE_TEST_SUITE_P(Sizes, KernelParity, ::testing::Values(0u, 1u, 17u, 4096u, 100003u));

TEST(KernelParity, ColumnKernelsMatchReference) {
  Rng rng(77);
  const std::size_t nx = 13, ny = 29, nz = 11;
  std::vector<std::int16_t> values(nx * ny * nz);
  for (auto& v : values) v = static_cast<std::int16_t>(kMinHu + static_cast<int>(rng.below(kMaxHu - kMinHu + 1)));
  std::vector<std::uint8_t> a(nx * nz), b(nx * nz);
  kernels::render_columns(values, nx, ny, nz, -1000.0, 200.0, a);
  kernels::reference::render_columns(values, nx, ny, nz, -1000.0, 200.0, b);
  EXPECT_EQ(a, b);

  std::vector<std::uint8_t> bits(nx * ny * nz);
  for (auto& v : bits) v = rng.uniform() < 0.05;
  kernels::project_columns(bits, nx, ny, nz, a);
  kernels::reference::project_columns(bits, nx, ny, nz, b);
  EXPECT_EQ(a, b);

  std::vector<std::uint8_t> e1(nx * ny * nz), e2(nx * ny * nz);
  kernels::extrude_columns(a, nx, ny, nz, e1);
  kernels::reference::extrude_columns(a, nx, ny, nz, e2);
  EXPECT_EQ(e1, e2);
}

TEST(WindowPixel, RoundsHalfAwayFromZero) {
  // (mean - lo) / (hi - lo) = 0.5 / 255 -> 0.5 -> 1
  EXPECT_EQ(kernels::window_pixel(0.5, 0.0, 255.0), 1);
  EXPECT_EQ(kernels::window_pixel(0.49, 0.0, 255.0), 0);
  EXPECT_EQ(kernels::window_pixel(254.5, 0.0, 255.0), 255);
}
