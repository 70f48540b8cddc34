#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace toporec {

// Binary segmentation mask. Pixels are row-major, each exactly 0 or 1
// (1 = foreground).
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  std::string label;
  std::string source_id;

  BinaryMask() = default;
  BinaryMask(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t& at(int col, int row) { return pixels[static_cast<std::size_t>(row) * width + col]; }
  std::uint8_t at(int col, int row) const {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }

  std::size_t foreground_count() const;
  bool is_square() const { return width == height; }
};

struct ManifestEntry {
  std::filesystem::path path;
  std::string label;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> classes;  // sorted, unique
  int image_size = 125;

  int class_index(const std::string& label) const;
};

// Reads an 8-bit grayscale PNG or a binary/ASCII PGM and thresholds it:
// pixel = 1 iff grayscale >= threshold. Throws UnreadableImage on a bad
// file and EmptyMask when nothing survives the threshold.
BinaryMask load_mask(const std::filesystem::path& path, int threshold = 128);

// Same thresholding applied to an in-memory grayscale buffer.
BinaryMask binarize(const std::vector<std::uint8_t>& gray, int width, int height, int threshold);

// Crops to the foreground bounding box, zero-pads the shorter axis
// symmetrically to a square, then resizes side x side with nearest
// neighbor (endpoints pinned, so upscaling keeps every source row/column).
BinaryMask normalize_mask(const BinaryMask& mask, int side);

// Quarter-turn counterclockwise as a pure index permutation.
BinaryMask rotate90(const BinaryMask& mask);

// [original, rot90, rot180, rot270]; requires a square mask.
std::array<BinaryMask, 4> augment_rotations(const BinaryMask& mask);

// Directory-per-class layout: every subdirectory of root is a class, files
// inside are entries (lexicographic order). A path to a CSV file with
// header `path,label` is accepted instead of a directory.
DatasetManifest load_manifest(const std::filesystem::path& root);

void write_pgm(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace toporec
