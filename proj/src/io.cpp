#include "lungcover/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "lungcover/error.hpp"

namespace lungcover::io {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void malformed(const fs::path& header, const std::string& what) {
  throw Error(ErrorCode::MalformedHeader, header.string() + ": " + what);
}

json parse_header(const fs::path& header) {
  const auto text = read_text(header);
  try {
    auto doc = json::parse(text);
    if (!doc.is_object()) malformed(header, "header is not a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    malformed(header, std::string("invalid JSON: ") + e.what());
  }
}

std::vector<std::size_t> read_dims(const json& doc, const fs::path& header, std::size_t rank) {
  auto it = doc.find("dims");
  if (it == doc.end() || !it->is_array() || it->size() != rank) {
    malformed(header, "\"dims\" must be an array of " + std::to_string(rank) + " integers");
  }
  std::vector<std::size_t> dims;
  for (const auto& d : *it) {
    if (!d.is_number_integer() || d.get<long long>() < 1) malformed(header, "\"dims\" entries must be integers >= 1");
    dims.push_back(d.get<std::size_t>());
  }
  return dims;
}

std::vector<double> read_spacing(const json& doc, const fs::path& header, std::size_t rank) {
  auto it = doc.find("spacing_mm");
  if (it == doc.end() || !it->is_array() || it->size() != rank) {
    malformed(header, "\"spacing_mm\" must be an array of " + std::to_string(rank) + " numbers");
  }
  std::vector<double> spacing;
  for (const auto& s : *it) {
    if (!s.is_number() || !(s.get<double>() > 0.0)) malformed(header, "\"spacing_mm\" entries must be > 0");
    spacing.push_back(s.get<double>());
  }
  return spacing;
}

void expect_dtype(const json& doc, const fs::path& header, std::string_view dtype) {
  auto it = doc.find("dtype");
  if (it == doc.end() || !it->is_string() || it->get<std::string>() != dtype) {
    malformed(header, "\"dtype\" must be \"" + std::string(dtype) + "\"");
  }
}

Label read_label(const json& doc, const fs::path& header) {
  auto it = doc.find("label");
  if (it == doc.end() || !it->is_string()) malformed(header, "mask header needs a \"label\"");
  auto label = parse_label(it->get<std::string>());
  if (!label) malformed(header, "\"label\" must be right, left or both");
  return *label;
}

std::vector<std::uint8_t> read_payload(const json& doc, const fs::path& header, std::size_t bytes) {
  auto it = doc.find("data");
  if (it == doc.end() || !it->is_string() || it->get<std::string>().empty()) {
    malformed(header, "\"data\" must name the raw payload");
  }
  fs::path raw = it->get<std::string>();
  if (raw.is_relative()) raw = header.parent_path() / raw;
  auto payload = read_file(raw);
  if (payload.size() != bytes) {
    throw Error(ErrorCode::SizeMismatch, raw.string() + ": expected " + std::to_string(bytes) +
                                             " bytes, found " + std::to_string(payload.size()));
  }
  return payload;
}

json make_header(std::initializer_list<std::size_t> dims, std::initializer_list<double> spacing,
                 std::string_view dtype, const fs::path& header) {
  json doc;
  doc["dims"] = json::array();
  for (auto d : dims) doc["dims"].push_back(d);
  doc["spacing_mm"] = json::array();
  for (auto s : spacing) doc["spacing_mm"].push_back(s);
  doc["dtype"] = dtype;
  doc["data"] = header.stem().string() + ".raw";
  return doc;
}

fs::path raw_path_for(const fs::path& header) {
  auto raw = header;
  raw.replace_extension(".raw");
  return raw;
}

void write_header(const fs::path& header, const json& doc) { write_file_atomic(header, doc.dump(2) + "\n"); }

std::vector<std::uint8_t> checked_mask_bytes(std::vector<std::uint8_t> bytes, const fs::path& header) {
  for (auto b : bytes) {
    if (b > 1) throw Error(ErrorCode::MalformedMask, header.string() + ": mask byte other than 0/1");
  }
  return bytes;
}

}  // namespace

VoxelVolume load_volume(const fs::path& header) {
  const auto doc = parse_header(header);
  const auto dims = read_dims(doc, header, 3);
  const auto spacing = read_spacing(doc, header, 3);
  expect_dtype(doc, header, "i16le");
  const GridGeometry g(dims[0], dims[1], dims[2], spacing[0], spacing[1], spacing[2]);
  const auto bytes = read_payload(doc, header, 2 * g.voxel_count());
  std::vector<std::int16_t> values(g.voxel_count());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto u = static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
    values[i] = static_cast<std::int16_t>(u);
  }
  return VoxelVolume(g, std::move(values));
}

void save_volume(const VoxelVolume& volume, const fs::path& header) {
  const auto& g = volume.geometry();
  std::vector<std::uint8_t> bytes(2 * g.voxel_count());
  const auto values = volume.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto u = static_cast<std::uint16_t>(values[i]);
    bytes[2 * i] = static_cast<std::uint8_t>(u & 0xff);
    bytes[2 * i + 1] = static_cast<std::uint8_t>(u >> 8);
  }
  write_file_atomic(raw_path_for(header), bytes);
  write_header(header, make_header({g.nx, g.ny, g.nz}, {g.sx, g.sy, g.sz}, "i16le", header));
}

Mask3D load_mask3d(const fs::path& header) {
  const auto doc = parse_header(header);
  const auto dims = read_dims(doc, header, 3);
  const auto spacing = read_spacing(doc, header, 3);
  expect_dtype(doc, header, "u8");
  const auto label = read_label(doc, header);
  const GridGeometry g(dims[0], dims[1], dims[2], spacing[0], spacing[1], spacing[2]);
  return Mask3D(g, checked_mask_bytes(read_payload(doc, header, g.voxel_count()), header), label);
}

void save_mask3d(const Mask3D& mask, const fs::path& header) {
  const auto& g = mask.geometry();
  write_file_atomic(raw_path_for(header), mask.bits());
  auto doc = make_header({g.nx, g.ny, g.nz}, {g.sx, g.sy, g.sz}, "u8", header);
  doc["label"] = to_string(mask.label());
  write_header(header, doc);
}

Mask2D load_mask2d(const fs::path& header) {
  const auto doc = parse_header(header);
  const auto dims = read_dims(doc, header, 2);
  const auto spacing = read_spacing(doc, header, 2);
  expect_dtype(doc, header, "u8");
  const auto label = read_label(doc, header);
  auto bits = checked_mask_bytes(read_payload(doc, header, dims[0] * dims[1]), header);
  return Mask2D(dims[0], dims[1], spacing[0], spacing[1], std::move(bits), label);
}

void save_mask2d(const Mask2D& mask, const fs::path& header) {
  write_file_atomic(raw_path_for(header), mask.bits());
  auto doc = make_header({mask.nx(), mask.nz()}, {mask.sx(), mask.sz()}, "u8", header);
  doc["label"] = to_string(mask.label());
  write_header(header, doc);
}

int header_rank(const fs::path& header) {
  const auto doc = parse_header(header);
  auto it = doc.find("dims");
  if (it == doc.end() || !it->is_array() || (it->size() != 2 && it->size() != 3)) {
    malformed(header, "\"dims\" must have 2 or 3 entries");
  }
  return static_cast<int>(it->size());
}

std::vector<std::uint8_t> encode_pgm(const DrrImage& image) {
  const auto head = "P5\n" + std::to_string(image.nx()) + " " + std::to_string(image.nz()) + "\n255\n";
  std::vector<std::uint8_t> bytes(head.begin(), head.end());
  bytes.insert(bytes.end(), image.pixels().begin(), image.pixels().end());
  return bytes;
}

void write_pgm(const DrrImage& image, const fs::path& path) { write_file_atomic(path, encode_pgm(image)); }

DrrImage read_pgm(const fs::path& path) {
  const auto bytes = read_file(path);
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> std::size_t {
    skip_space();
    std::size_t value = 0;
    const auto start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) value = value * 10 + (bytes[pos++] - '0');
    if (pos == start) throw Error(ErrorCode::MalformedHeader, path.string() + ": bad PGM header");
    return value;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw Error(ErrorCode::MalformedHeader, path.string() + ": not a binary PGM");
  }
  pos = 2;
  const auto w = read_int();
  const auto h = read_int();
  const auto maxval = read_int();
  if (maxval != 255) throw Error(ErrorCode::MalformedHeader, path.string() + ": maxval must be 255");
  ++pos;  // single whitespace before the raster
  if (bytes.size() - pos != w * h) throw Error(ErrorCode::SizeMismatch, path.string() + ": raster size");
  return DrrImage(w, h, std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end()));
}

void write_mask_pgm(const Mask2D& mask, const fs::path& path) {
  std::vector<std::uint8_t> pixels(mask.bits().begin(), mask.bits().end());
  for (auto& p : pixels) p = p ? 255 : 0;
  write_pgm(DrrImage(mask.nx(), mask.nz(), std::move(pixels)), path);
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot rename " + tmp.string() + ": " + ec.message());
}

void write_file_atomic(const fs::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
  return bytes;
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace lungcover::io
