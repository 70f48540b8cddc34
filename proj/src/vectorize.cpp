#include "toporec/vectorize.hpp"

#include <cmath>

#include "toporec/errors.hpp"

namespace toporec {

void PersistenceImageConfig::validate() const {
  if (grid_side < 1) throw Error("persistence image grid_side must be >= 1");
  if (!(spread > 0.0)) throw Error("persistence image spread must be > 0");
  if (!(birth_hi > birth_lo)) throw DegenerateRange("birth axis");
  if (!(pers_hi > pers_lo)) throw DegenerateRange("persistence axis");
}

std::vector<std::pair<double, double>> birth_persistence(const PersistenceDiagram& pd) {
  std::vector<std::pair<double, double>> out;
  out.reserve(pd.pairs.size());
  for (const auto& p : pd.pairs) out.emplace_back(p.birth, p.death - p.birth);
  return out;
}

namespace {

struct WeightedPoint {
  double b, p, w;
};

std::vector<WeightedPoint> weighted_points(const PersistenceDiagram& pd,
                                           const PersistenceImageConfig& cfg) {
  std::vector<WeightedPoint> pts;
  pts.reserve(pd.pairs.size());
  for (const auto& pr : pd.pairs) {
    const double pers = pr.death - pr.birth;
    if (pers <= 0.0 || cfg.weight_pmax <= 0.0) continue;
    pts.push_back({pr.birth, pers, pers / cfg.weight_pmax});
  }
  return pts;
}

}  // namespace

PersistenceImage persistence_image(const PersistenceDiagram& pd,
                                   const PersistenceImageConfig& cfg, bool parallel) {
  cfg.validate();
  PersistenceImage img;
  img.config = cfg;
  img.direction_index = pd.direction_index;
  const int g = cfg.grid_side;
  img.values.assign(static_cast<std::size_t>(g) * g, 0.0);

  const auto pts = weighted_points(pd, cfg);
  if (pts.empty()) return img;

  const double inv2s2 = 1.0 / (2.0 * cfg.spread * cfg.spread);
  const double norm = 1.0 / (2.0 * M_PI * cfg.spread * cfg.spread);
  const std::size_t np = pts.size();

  // separable: exp(-(db^2 + dp^2)) = exp(-db^2) * exp(-dp^2)
  std::vector<double> eb(np * g), ep(np * g);
  for (std::size_t t = 0; t < np; ++t) {
    for (int j = 0; j < g; ++j) {
      const double db = cfg.birth_center(j) - pts[t].b;
      eb[t * g + j] = std::exp(-db * db * inv2s2);
    }
    for (int i = 0; i < g; ++i) {
      const double dp = cfg.pers_center(i) - pts[t].p;
      ep[t * g + i] = std::exp(-dp * dp * inv2s2);
    }
  }

#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < g; ++i) {
    double* row = img.values.data() + static_cast<std::size_t>(i) * g;
    for (std::size_t t = 0; t < np; ++t) {
      const double row_factor = pts[t].w * ep[t * g + i] * norm;
      const double* ebt = eb.data() + t * g;
      for (int j = 0; j < g; ++j) row[j] += row_factor * ebt[j];
    }
  }
  return img;
}

PersistenceImage persistence_image_serial(const PersistenceDiagram& pd,
                                          const PersistenceImageConfig& cfg) {
  cfg.validate();
  PersistenceImage img;
  img.config = cfg;
  img.direction_index = pd.direction_index;
  const int g = cfg.grid_side;
  img.values.assign(static_cast<std::size_t>(g) * g, 0.0);

  const auto pts = weighted_points(pd, cfg);
  const double inv2s2 = 1.0 / (2.0 * cfg.spread * cfg.spread);
  const double norm = 1.0 / (2.0 * M_PI * cfg.spread * cfg.spread);

  for (const auto& pt : pts) {
    for (int i = 0; i < g; ++i) {
      const double dp = cfg.pers_center(i) - pt.p;
      for (int j = 0; j < g; ++j) {
        const double db = cfg.birth_center(j) - pt.b;
        img.values[static_cast<std::size_t>(i) * g + j] +=
            pt.w * norm * std::exp(-(db * db + dp * dp) * inv2s2);
      }
    }
  }
  return img;
}

double bottleneck_amplitude(const PersistenceDiagram& pd) {
  double max_pers = 0.0;
  for (const auto& p : pd.pairs) max_pers = std::max(max_pers, p.death - p.birth);
  return 0.5 * std::sqrt(2.0) * max_pers;
}

std::vector<double> amplitude_vector(const std::vector<PersistenceDiagram>& pds) {
  std::vector<double> out(pds.size());
  for (std::size_t k = 0; k < pds.size(); ++k) {
    if (pds[k].direction_index != static_cast<int>(k))
      throw WrongDirectionCount("amplitude_vector: diagrams must be ordered by direction");
    out[k] = bottleneck_amplitude(pds[k]);
  }
  return out;
}

}  // namespace toporec
