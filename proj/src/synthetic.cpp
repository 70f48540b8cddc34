#include "toporec/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "toporec/errors.hpp"
#include "toporec/rng.hpp"

namespace toporec {

namespace {

struct Satellite {
  double angle = 0.0;   // where the island sits relative to the body
  double gap = 0.0;     // clearance between body boundary and island
  double radius = 0.0;  // island radius, relative to side
};

struct BlobShape {
  std::vector<double> amplitude;  // harmonics 2..(1+n)
  std::vector<double> phase;
  std::vector<Satellite> satellites;
  double rotation = 0.0;
  double scale = 1.0;
};

double boundary_radius(const BlobShape& shape, double theta) {
  double radius = 1.0;
  for (std::size_t j = 0; j < shape.amplitude.size(); ++j)
    radius += shape.amplitude[j] * std::cos((j + 2.0) * theta + shape.phase[j]);
  return std::max(radius, 0.15);
}

// main body plus small disconnected islands; islands make the diagrams of
// different directions genuinely different, which is what the sparse PI
// features key on
BinaryMask render_blob(const BlobShape& shape, int side) {
  BinaryMask mask(side, side);
  const double cx = (side - 1) / 2.0;
  const double cy = (side - 1) / 2.0;
  const double r0 = 0.26 * side * shape.scale;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const double dx = c - cx, dy = r - cy;
      const double dist = std::sqrt(dx * dx + dy * dy);
      const double theta = std::atan2(dy, dx) + shape.rotation;
      if (dist <= r0 * boundary_radius(shape, theta)) mask.at(c, r) = 1;
    }
  }
  for (const auto& sat : shape.satellites) {
    const double theta = sat.angle - shape.rotation;
    const double rsat = sat.radius * side;
    double center = r0 * boundary_radius(shape, sat.angle) + sat.gap * side + rsat;
    center = std::min(center, 0.5 * side - rsat - 1.5);
    const double sx = cx + center * std::cos(theta);
    const double sy = cy + center * std::sin(theta);
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c) {
        const double dx = c - sx, dy = r - sy;
        if (dx * dx + dy * dy <= rsat * rsat) mask.at(c, r) = 1;
      }
  }
  return mask;
}

}  // namespace

SyntheticDataset make_synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.classes < 1 || spec.per_class < 1 || spec.side < 8)
    throw Error("make_synthetic_dataset: bad spec");
  SyntheticDataset ds;
  char name[32];
  for (int cls = 0; cls < spec.classes; ++cls) {
    std::snprintf(name, sizeof(name), "shape%03d", cls);
    ds.class_names.push_back(name);

    Rng proto_rng(derive_seed(spec.seed, 0xb10b + cls));
    const int harmonics = 3 + static_cast<int>(proto_rng.below(3));  // 3..5
    BlobShape proto;
    for (int j = 0; j < harmonics; ++j) {
      proto.amplitude.push_back(proto_rng.uniform(-0.42, 0.42) / std::sqrt(j + 1.0));
      proto.phase.push_back(proto_rng.uniform(0.0, 2.0 * M_PI));
    }
    const int islands = 1 + static_cast<int>(proto_rng.below(2));  // 1..2
    for (int i = 0; i < islands; ++i)
      proto.satellites.push_back({proto_rng.uniform(0.0, 2.0 * M_PI),
                                  proto_rng.uniform(0.03, 0.06),
                                  proto_rng.uniform(0.05, 0.08)});

    for (int s = 0; s < spec.per_class; ++s) {
      Rng rng(derive_seed(spec.seed, (static_cast<std::uint64_t>(cls) << 20) + s));
      BlobShape shape = proto;
      for (std::size_t j = 0; j < shape.amplitude.size(); ++j) {
        shape.amplitude[j] += rng.uniform(-spec.jitter, spec.jitter) * 0.42;
        shape.phase[j] += rng.uniform(-spec.jitter, spec.jitter);
      }
      for (auto& sat : shape.satellites) {
        sat.angle += rng.uniform(-spec.jitter, spec.jitter);
        sat.radius *= 1.0 + rng.uniform(-spec.jitter, spec.jitter);
      }
      shape.rotation = rng.uniform(-spec.rotation_jitter, spec.rotation_jitter);
      shape.scale = 1.0 + rng.uniform(-spec.scale_jitter, spec.scale_jitter);
      BinaryMask mask = render_blob(shape, spec.side);
      mask.label = ds.class_names.back();
      std::snprintf(name, sizeof(name), "shape%03d_%03d", cls, s);
      mask.source_id = name;
      ds.masks.push_back(std::move(mask));
      ds.labels.push_back(cls);
    }
  }
  return ds;
}

BinaryMask random_mask(int width, int height, double p, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x6d61736b));
  BinaryMask mask(width, height);
  for (auto& px : mask.pixels) px = rng.next_double() < p ? 1 : 0;
  if (mask.foreground_count() == 0)
    mask.pixels[rng.below(mask.pixels.size())] = 1;
  return mask;
}

void write_synthetic_dataset(const std::filesystem::path& root, const SyntheticSpec& spec) {
  const SyntheticDataset ds = make_synthetic_dataset(spec);
  namespace fs = std::filesystem;
  fs::create_directories(root);
  for (std::size_t i = 0; i < ds.masks.size(); ++i) {
    const auto dir = root / ds.class_names[ds.labels[i]];
    fs::create_directories(dir);
    write_pgm(dir / (ds.masks[i].source_id + ".pgm"), ds.masks[i]);
  }
}

}  // namespace toporec
