#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toporec/folds.hpp"
#include "toporec/height.hpp"
#include "toporec/mask.hpp"
#include "toporec/metrics.hpp"
#include "toporec/mlp.hpp"
#include "toporec/sampler.hpp"

namespace toporec {

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

// Diagrams for one (mask, rotation) record, one per direction.
struct SampleDiagrams {
  std::uint32_t sample_id = 0;
  std::uint32_t rot_id = 0;
  int class_index = 0;
  std::vector<PersistenceDiagram> pds;
};

// Height fields + 0-dim diagrams for every mask and, when `augment` is set,
// its three quarter-turn rotations. Records are independent, so the loop is
// distributed over threads; output order does not depend on the thread
// count.
std::vector<SampleDiagrams> extract_diagrams(const std::vector<BinaryMask>& masks,
                                             const std::vector<int>& labels,
                                             const std::vector<Direction>& directions,
                                             bool augment, bool parallel);

// Persistence image axes and weight normalizer fitted on a set of records:
// birth in [0, max h_infinity], persistence in [0, max persistence].
PersistenceImageConfig fit_pi_config(const std::vector<const SampleDiagrams*>& records,
                                     int grid_side, double spread);

struct ExperimentConfig {
  int directions = 8;
  int pi_grid = 50;
  double pi_spread = 10.0;
  int folds = 5;
  std::uint64_t seed = 0;
  ModelKind kind = ModelKind::sparse_pi;
  TrainConfig train;
  bool parallel = false;
};

struct FoldOutcome {
  MetricsReport metrics;
  PersistenceImageConfig pi_config;
  SparseSampler sampler;  // empty for the amplitude kind
  MlpModel model;
  std::uint64_t fit_input_hash = 0;  // hash of (sample_id, rot_id) pairs every fit saw
  std::vector<std::uint32_t> test_sample_ids;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over folds
};

struct ExperimentResult {
  std::vector<FoldOutcome> folds;
  FoldPlan plan;
  Aggregate accuracy, weighted_f1, weighted_precision, weighted_recall;
};

// Five-fold protocol: per fold, the PI ranges, weight normalizer, sampler
// and classifier are fitted on the training folds only (augmented records
// included); the test fold is evaluated without augmentation.
ExperimentResult run_experiment(const std::vector<SampleDiagrams>& diagrams,
                                const std::vector<std::string>& classes,
                                const ExperimentConfig& cfg);

}  // namespace toporec
