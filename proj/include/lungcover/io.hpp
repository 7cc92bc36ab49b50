#pragma once

// File formats.
//
// Volumes and masks are a UTF-8 JSON header plus a raw payload:
//   {"dims":[nx,ny,nz],"spacing_mm":[sx,sy,sz],"dtype":"i16le"|"u8",
//    "data":"<path relative to the header>","label":"right"|"left"|"both"}
// 2D masks use "dims":[nx,nz] and "spacing_mm":[sx,sz]. Volumes are
// little-endian int16, masks one byte per cell valued 0 or 1, both stored
// x-fastest. save_* writes <stem>.raw next to the header.
//
// DRR images are binary PGM (P5, maxval 255), rows in ascending z.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lungcover/grid.hpp"

namespace lungcover::io {

VoxelVolume load_volume(const std::filesystem::path& header);
void save_volume(const VoxelVolume& volume, const std::filesystem::path& header);

Mask3D load_mask3d(const std::filesystem::path& header);
void save_mask3d(const Mask3D& mask, const std::filesystem::path& header);

Mask2D load_mask2d(const std::filesystem::path& header);
void save_mask2d(const Mask2D& mask, const std::filesystem::path& header);

/// Number of entries in a header's "dims" (2 or 3).
int header_rank(const std::filesystem::path& header);

std::vector<std::uint8_t> encode_pgm(const DrrImage& image);
void write_pgm(const DrrImage& image, const std::filesystem::path& path);
DrrImage read_pgm(const std::filesystem::path& path);
/// Inspection export: set pixels become 255.
void write_mask_pgm(const Mask2D& mask, const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

}  // namespace lungcover::io
