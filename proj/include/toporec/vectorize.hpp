#pragma once

#include <utility>
#include <vector>

#include "toporec/persistence.hpp"

namespace toporec {

// Grid and kernel parameters for persistence images. Ranges and the weight
// normalizer are fitted on training data once and then frozen; every PI of
// a run is produced with the same config.
struct PersistenceImageConfig {
  int grid_side = 50;
  double spread = 10.0;
  double birth_lo = 0.0;
  double birth_hi = 1.0;
  double pers_lo = 0.0;
  double pers_hi = 1.0;
  double weight_pmax = 1.0;  // linear weight w(p) = p / weight_pmax

  void validate() const;  // throws DegenerateRange / Error
  double birth_center(int col) const {
    return birth_lo + (col + 0.5) * (birth_hi - birth_lo) / grid_side;
  }
  double pers_center(int row) const {
    return pers_lo + (row + 0.5) * (pers_hi - pers_lo) / grid_side;
  }
};

// Row-major grid, rows index the persistence axis, columns the birth axis.
struct PersistenceImage {
  std::vector<double> values;
  PersistenceImageConfig config;
  int direction_index = 0;

  double at(int birth_col, int pers_row) const {
    return values[static_cast<std::size_t>(pers_row) * config.grid_side + birth_col];
  }
};

// (birth, death) -> (birth, death - birth)
std::vector<std::pair<double, double>> birth_persistence(const PersistenceDiagram& pd);

// PI(g) = sum over points of w(p) * exp(-(|g - (b,p)|^2) / (2 spread^2))
//         / (2 pi spread^2),
// evaluated at cell centers. Zero-persistence points contribute nothing.
// Parallel kernel (separable exponentials, rows distributed over threads);
// bitwise identical to the serial reference for any thread count is NOT
// guaranteed here because the factorization differs — the reference below
// is the plain dense evaluation used by tests and the benchmark.
PersistenceImage persistence_image(const PersistenceDiagram& pd,
                                   const PersistenceImageConfig& cfg, bool parallel = false);

// Dense points-outer double loop, one exp per (point, cell). Kept as the
// independent reference for testing and benchmarking the kernel above.
PersistenceImage persistence_image_serial(const PersistenceDiagram& pd,
                                          const PersistenceImageConfig& cfg);

// (sqrt(2)/2) * max persistence; 0 for an empty diagram.
double bottleneck_amplitude(const PersistenceDiagram& pd);

// One bottleneck amplitude per direction, in direction order.
std::vector<double> amplitude_vector(const std::vector<PersistenceDiagram>& pds);

}  // namespace toporec
