#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "toporec/persistence.hpp"

namespace toporec {

enum class FeatureKind : std::uint32_t { pd0 = 0, pi = 1, amplitude = 2, sparse_pi = 3 };

const char* feature_kind_name(FeatureKind kind);
FeatureKind feature_kind_from_name(const std::string& name);

// One record per (mask, augmentation). Vector kinds fill `values`
// (length = dims); the pd0 kind fills `diagrams` (one per direction).
struct FeatureRecord {
  std::uint32_t class_index = 0;
  std::uint32_t sample_id = 0;
  std::uint32_t rot_id = 0;
  std::vector<double> values;
  std::vector<PersistenceDiagram> diagrams;
};

// Versioned flat binary, little-endian 64-bit floats. Header carries the
// kind, per-record dims, direction count, class table and a small
// key=value metadata block (persistence image config and the like).
struct FeatureFile {
  FeatureKind kind = FeatureKind::pd0;
  std::uint32_t directions = 0;
  std::uint32_t dims = 0;  // per-record vector length; 0 for pd0
  std::vector<std::string> classes;
  std::map<std::string, std::string> meta;
  std::vector<FeatureRecord> records;
};

void write_features(const std::filesystem::path& path, const FeatureFile& file);
FeatureFile read_features(const std::filesystem::path& path);

}  // namespace toporec
