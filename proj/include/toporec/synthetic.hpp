#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "toporec/mask.hpp"

namespace toporec {

// Procedural silhouette benchmark: each class is a star-convex blob whose
// boundary radius is a fixed random Fourier series; samples jitter the
// harmonics, global scale and orientation. Useful for exercising the whole
// pipeline when no real dataset is mounted.
struct SyntheticSpec {
  int classes = 8;
  int per_class = 20;
  int side = 64;
  std::uint64_t seed = 1;
  double jitter = 0.12;          // relative harmonic jitter per sample
  double rotation_jitter = 0.1;  // radians
  double scale_jitter = 0.08;    // relative
};

struct SyntheticDataset {
  std::vector<BinaryMask> masks;
  std::vector<int> labels;
  std::vector<std::string> class_names;
};

SyntheticDataset make_synthetic_dataset(const SyntheticSpec& spec);

// Bernoulli(p) noise mask; at least one foreground pixel is forced.
BinaryMask random_mask(int width, int height, double p, std::uint64_t seed);

// Writes the dataset as a directory-per-class tree of PGM files.
void write_synthetic_dataset(const std::filesystem::path& root, const SyntheticSpec& spec);

}  // namespace toporec
