#include "toporec/features_io.hpp"

#include <cstring>
#include <fstream>

#include "toporec/errors.hpp"

namespace toporec {

const char* feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::pd0: return "pd0";
    case FeatureKind::pi: return "pi";
    case FeatureKind::amplitude: return "amplitude";
    case FeatureKind::sparse_pi: return "sparse-pi";
  }
  return "unknown";
}

FeatureKind feature_kind_from_name(const std::string& name) {
  if (name == "pd0") return FeatureKind::pd0;
  if (name == "pi") return FeatureKind::pi;
  if (name == "amplitude") return FeatureKind::amplitude;
  if (name == "sparse-pi" || name == "sparse_pi") return FeatureKind::sparse_pi;
  throw Error("unknown feature kind: " + name);
}

namespace {

constexpr char kMagic[8] = {'T', 'R', 'E', 'C', 'F', 'T', 'R', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}
void put_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), 8);
}
void put_f64(std::ofstream& out, double v) { out.write(reinterpret_cast<const char*>(&v), 8); }
void put_str(std::ofstream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
std::uint64_t get_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
double get_f64(std::ifstream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
std::string get_str(std::ifstream& in) {
  std::string s(get_u32(in), '\0');
  in.read(s.data(), static_cast<std::streamsize>(s.size()));
  return s;
}

}  // namespace

void write_features(const std::filesystem::path& path, const FeatureFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMagic, 8);
  put_u32(out, 1);  // version
  put_u32(out, static_cast<std::uint32_t>(file.kind));
  put_u32(out, file.directions);
  put_u32(out, file.dims);
  put_u32(out, static_cast<std::uint32_t>(file.classes.size()));
  put_u64(out, file.records.size());
  put_u32(out, static_cast<std::uint32_t>(file.meta.size()));
  for (const auto& [key, value] : file.meta) {
    put_str(out, key);
    put_str(out, value);
  }
  for (const auto& cls : file.classes) put_str(out, cls);

  for (const auto& rec : file.records) {
    put_u32(out, rec.class_index);
    put_u32(out, rec.sample_id);
    put_u32(out, rec.rot_id);
    if (file.kind == FeatureKind::pd0) {
      if (rec.diagrams.size() != file.directions)
        throw ShapeMismatch("feature record diagram count");
      for (const auto& pd : rec.diagrams) {
        put_f64(out, pd.h_infinity);
        put_u32(out, static_cast<std::uint32_t>(pd.pairs.size()));
        for (const auto& p : pd.pairs) {
          put_f64(out, p.birth);
          put_f64(out, p.death);
        }
      }
    } else {
      if (rec.values.size() != file.dims) throw ShapeMismatch("feature record vector length");
      out.write(reinterpret_cast<const char*>(rec.values.data()),
                8 * static_cast<std::streamsize>(rec.values.size()));
    }
  }
  if (!out) throw Error("short write: " + path.string());
}

FeatureFile read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw Error("not a feature file: " + path.string());
  if (get_u32(in) != 1) throw Error("unsupported feature file version");

  FeatureFile file;
  file.kind = static_cast<FeatureKind>(get_u32(in));
  file.directions = get_u32(in);
  file.dims = get_u32(in);
  const std::uint32_t class_count = get_u32(in);
  const std::uint64_t record_count = get_u64(in);
  const std::uint32_t meta_count = get_u32(in);
  for (std::uint32_t i = 0; i < meta_count; ++i) {
    std::string key = get_str(in);
    file.meta[key] = get_str(in);
  }
  file.classes.resize(class_count);
  for (auto& cls : file.classes) cls = get_str(in);

  file.records.resize(record_count);
  for (auto& rec : file.records) {
    rec.class_index = get_u32(in);
    rec.sample_id = get_u32(in);
    rec.rot_id = get_u32(in);
    if (file.kind == FeatureKind::pd0) {
      rec.diagrams.resize(file.directions);
      for (std::uint32_t k = 0; k < file.directions; ++k) {
        auto& pd = rec.diagrams[k];
        pd.direction_index = static_cast<int>(k);
        pd.h_infinity = get_f64(in);
        pd.pairs.resize(get_u32(in));
        for (auto& p : pd.pairs) {
          p.birth = get_f64(in);
          p.death = get_f64(in);
        }
      }
    } else {
      rec.values.resize(file.dims);
      in.read(reinterpret_cast<char*>(rec.values.data()),
              8 * static_cast<std::streamsize>(rec.values.size()));
    }
    if (!in) throw Error("truncated feature file: " + path.string());
  }
  return file;
}

}  // namespace toporec
