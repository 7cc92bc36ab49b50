#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>

#include "lungcover/error.hpp"
#include "lungcover/io.hpp"
#include "test_support.hpp"

using namespace lungcover;
using testsupport::TempDir;

namespace {

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

TEST(Grid, GeometryRejectsBadShape) {
  EXPECT_EQ(code_of([] { GridGeometry(0, 1, 1, 1, 1, 1); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { GridGeometry(1, 1, 1, 1, -1, 1); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { GridGeometry(1, 1, 1, 1, 1, std::nan("")); }), ErrorCode::InvalidArgument);
}

TEST(Grid, IndexIsXFastest) {
  const GridGeometry g(3, 4, 5, 1, 1, 1);
  EXPECT_EQ(g.index(0, 0, 0), 0u);
  EXPECT_EQ(g.index(1, 0, 0), 1u);
  EXPECT_EQ(g.index(0, 1, 0), 3u);
  EXPECT_EQ(g.index(0, 0, 1), 12u);
  EXPECT_EQ(g.index(2, 3, 4), g.voxel_count() - 1);
  EXPECT_DOUBLE_EQ(g.center_z(2), 2.5);
}

TEST(Grid, VoxelVolumeMl) {
  EXPECT_DOUBLE_EQ(voxel_volume_ml(GridGeometry(1, 1, 1, 2.0, 2.0, 2.5)), 0.01);
}

TEST(Grid, LabelsRoundTrip) {
  for (auto l : {Label::right, Label::left, Label::both}) EXPECT_EQ(parse_label(to_string(l)), l);
  EXPECT_FALSE(parse_label("middle"));
}

TEST(Grid, VolumeRejectsOutOfRangeHu) {
  const GridGeometry g(2, 1, 1, 1, 1, 1);
  EXPECT_EQ(code_of([&] { VoxelVolume(g, std::vector<std::int16_t>{0, -1025}); }), ErrorCode::ValueOutOfRange);
  EXPECT_EQ(code_of([&] { VoxelVolume(g, std::vector<std::int16_t>{0, 3072}); }), ErrorCode::ValueOutOfRange);
  EXPECT_EQ(code_of([&] { VoxelVolume(g, std::vector<std::int16_t>{0}); }), ErrorCode::SizeMismatch);
}

TEST(Grid, MaskRejectsNonBinaryBytes) {
  const GridGeometry g(2, 1, 1, 1, 1, 1);
  EXPECT_EQ(code_of([&] { Mask3D(g, std::vector<std::uint8_t>{0, 2}, Label::left); }), ErrorCode::MalformedMask);
  EXPECT_EQ(code_of([&] { Mask2D(2, 1, 1, 1, std::vector<std::uint8_t>{1}, Label::left); }), ErrorCode::SizeMismatch);
}

TEST(Io, VolumeRoundTripAndStorageOrder) {
  TempDir dir("io_volume");
  const GridGeometry g(3, 2, 2, 0.5, 0.75, 1.25);
  std::vector<std::int16_t> v(g.voxel_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<std::int16_t>(-1024 + 300 * static_cast<int>(i));
  const VoxelVolume vol(g, v);
  io::save_volume(vol, dir / "ct.json");
  EXPECT_EQ(io::load_volume(dir / "ct.json"), vol);

  // Payload is little-endian int16, x fastest.
  const auto raw = io::read_file(dir / "ct.raw");
  ASSERT_EQ(raw.size(), 2 * g.voxel_count());
  const auto at = [&](std::size_t i) { return static_cast<std::int16_t>(raw[2 * i] | (raw[2 * i + 1] << 8)); };
  EXPECT_EQ(at(g.index(2, 1, 1)), vol.at(2, 1, 1));
  EXPECT_EQ(at(1), -724);

  const auto doc = nlohmann::json::parse(io::read_text(dir / "ct.json"));
  EXPECT_EQ(doc.at("dtype"), "i16le");
  EXPECT_EQ(doc.at("data"), "ct.raw");
  EXPECT_EQ(doc.at("dims"), (std::vector<int>{3, 2, 2}));
}

TEST(Io, MaskRoundTrips) {
  TempDir dir("io_mask");
  Rng rng(11);
  const GridGeometry g(5, 3, 4, 1.0, 2.0, 3.0);
  const auto m3 = testsupport::random_mask3d(g, 0.4, rng, Label::left);
  io::save_mask3d(m3, dir / "m3.json");
  EXPECT_EQ(io::load_mask3d(dir / "m3.json"), m3);
  EXPECT_EQ(io::header_rank(dir / "m3.json"), 3);

  const auto m2 = testsupport::random_mask2d(5, 4, 1.0, 3.0, 0.5, rng, Label::both);
  io::save_mask2d(m2, dir / "m2.json");
  EXPECT_EQ(io::load_mask2d(dir / "m2.json"), m2);
  EXPECT_EQ(io::header_rank(dir / "m2.json"), 2);
}

TEST(Io, LoadErrors) {
  TempDir dir("io_err");
  EXPECT_EQ(code_of([&] { io::load_mask3d(dir / "missing.json"); }), ErrorCode::IoFailure);

  io::write_file_atomic(dir / "bad.json", std::string_view("{not json"));
  EXPECT_EQ(code_of([&] { io::load_mask3d(dir / "bad.json"); }), ErrorCode::MalformedHeader);

  const Mask2D m(4, 2, 1, 1, Label::right);
  io::save_mask2d(m, dir / "m.json");
  io::write_file_atomic(dir / "m.raw", std::string_view("\x01\x00\x01", 3));
  EXPECT_EQ(code_of([&] { io::load_mask2d(dir / "m.json"); }), ErrorCode::SizeMismatch);
  io::write_file_atomic(dir / "m.raw", std::string_view("\x01\x00\x01\x00\x07\x00\x00\x00", 8));
  EXPECT_EQ(code_of([&] { io::load_mask2d(dir / "m.json"); }), ErrorCode::MalformedMask);

  // A 2D header is not a 3D mask.
  io::save_mask2d(m, dir / "m.json");
  EXPECT_EQ(code_of([&] { io::load_mask3d(dir / "m.json"); }), ErrorCode::MalformedHeader);
}

TEST(Io, PgmIsExactBytes) {
  const DrrImage img(3, 2, {0, 1, 2, 253, 254, 255});
  const auto bytes = io::encode_pgm(img);
  const std::string header = "P5\n3 2\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 6);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(header.size())), header);
  EXPECT_EQ(bytes.back(), 255);

  TempDir dir("pgm");
  io::write_pgm(img, dir / "a.pgm");
  EXPECT_EQ(io::read_pgm(dir / "a.pgm"), img);
  EXPECT_EQ(io::read_file(dir / "a.pgm"), bytes);
}

TEST(Io, AtomicWriteLeavesNoTemporary) {
  TempDir dir("atomic");
  io::write_file_atomic(dir / "x.txt", std::string_view("hello"));
  EXPECT_EQ(io::read_text(dir / "x.txt"), "hello");
  EXPECT_FALSE(std::filesystem::exists(dir / "x.txt.tmp"));
  EXPECT_EQ(code_of([&] { io::write_file_atomic(dir / "no/such/dir/x", std::string_view("a")); }),
            ErrorCode::IoFailure);
}
