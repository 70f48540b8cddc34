#include "toporec/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "toporec/errors.hpp"
#include "toporec/rng.hpp"
#include "toporec/vectorize.hpp"

namespace toporec {

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<SampleDiagrams> extract_diagrams(const std::vector<BinaryMask>& masks,
                                             const std::vector<int>& labels,
                                             const std::vector<Direction>& directions,
                                             bool augment, bool parallel) {
  if (masks.size() != labels.size()) throw LengthMismatch("extract_diagrams: masks vs labels");
  const int rots = augment ? 4 : 1;
  const std::size_t total = masks.size() * rots;
  std::vector<SampleDiagrams> records(total);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(total); ++idx) {
    const std::size_t sample = idx / rots;
    const int rot = static_cast<int>(idx % rots);
    BinaryMask mask = masks[sample];
    for (int r = 0; r < rot; ++r) mask = rotate90(mask);
    auto& rec = records[idx];
    rec.sample_id = static_cast<std::uint32_t>(sample);
    rec.rot_id = static_cast<std::uint32_t>(rot);
    rec.class_index = labels[sample];
    rec.pds.reserve(directions.size());
    for (const auto& dir : directions) rec.pds.push_back(compute_pd0(height_field(mask, dir)));
  }
  return records;
}

PersistenceImageConfig fit_pi_config(const std::vector<const SampleDiagrams*>& records,
                                     int grid_side, double spread) {
  double max_hinf = 0.0;
  double max_pers = 0.0;
  for (const auto* rec : records) {
    for (const auto& pd : rec->pds) {
      max_hinf = std::max(max_hinf, pd.h_infinity);
      for (const auto& p : pd.pairs) max_pers = std::max(max_pers, p.death - p.birth);
    }
  }
  PersistenceImageConfig cfg;
  cfg.grid_side = grid_side;
  cfg.spread = spread;
  cfg.birth_lo = 0.0;
  cfg.birth_hi = max_hinf;
  cfg.pers_lo = 0.0;
  cfg.pers_hi = max_pers;
  cfg.weight_pmax = max_pers;
  return cfg;
}

namespace {

Aggregate aggregate_of(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  for (double v : values) a.mean += v;
  a.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return a;
}

std::uint64_t hash_records(const std::vector<const SampleDiagrams*>& records) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto* rec : records) {
    const std::uint32_t ids[2] = {rec->sample_id, rec->rot_id};
    h = fnv1a64(ids, sizeof(ids), h);
  }
  return h;
}

// PI for one record and one direction under a frozen config
PersistenceImage record_pi(const SampleDiagrams& rec, int k, const PersistenceImageConfig& cfg,
                           bool parallel) {
  return persistence_image(rec.pds[k], cfg, parallel);
}

}  // namespace

ExperimentResult run_experiment(const std::vector<SampleDiagrams>& diagrams,
                                const std::vector<std::string>& classes,
                                const ExperimentConfig& cfg) {
  if (diagrams.empty()) throw EmptyDataset("run_experiment");
  const int num_classes = static_cast<int>(classes.size());

  // rot 0 records define the samples
  std::uint32_t num_samples = 0;
  for (const auto& rec : diagrams)
    num_samples = std::max(num_samples, rec.sample_id + 1);
  std::vector<int> labels(num_samples, -1);
  for (const auto& rec : diagrams)
    if (rec.rot_id == 0) labels[rec.sample_id] = rec.class_index;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] < 0) throw Error("run_experiment: sample " + std::to_string(i) + " has no rot-0 record");

  ExperimentResult result;
  result.plan = make_folds(labels, num_classes, cfg.folds, cfg.seed);

  std::vector<double> fold_acc, fold_f1, fold_prec, fold_rec;
  for (int fold = 0; fold < cfg.folds; ++fold) {
    std::vector<const SampleDiagrams*> train_recs, test_recs;
    for (const auto& rec : diagrams) {
      if (result.plan.assignment[rec.sample_id] == fold) {
        if (rec.rot_id == 0) test_recs.push_back(&rec);
      } else {
        train_recs.push_back(&rec);
      }
    }
    if (train_recs.empty() || test_recs.empty())
      throw Error("run_experiment: empty train or test split in fold " + std::to_string(fold));

    FoldOutcome outcome;
    outcome.fit_input_hash = hash_records(train_recs);
    for (const auto* rec : test_recs) outcome.test_sample_ids.push_back(rec->sample_id);

    const int n_train = static_cast<int>(train_recs.size());
    const int n_test = static_cast<int>(test_recs.size());
    Matrix train_x, test_x;

    if (cfg.kind == ModelKind::amplitude) {
      train_x = Matrix(n_train, cfg.directions);
      test_x = Matrix(n_test, cfg.directions);
#pragma omp parallel for schedule(static) if (cfg.parallel)
      for (int i = 0; i < n_train; ++i) {
        const auto v = amplitude_vector(train_recs[i]->pds);
        std::copy(v.begin(), v.end(), train_x.row(i));
      }
      for (int i = 0; i < n_test; ++i) {
        const auto v = amplitude_vector(test_recs[i]->pds);
        std::copy(v.begin(), v.end(), test_x.row(i));
      }
    } else {
      outcome.pi_config = fit_pi_config(train_recs, cfg.pi_grid, cfg.pi_spread);
      if (!(outcome.pi_config.weight_pmax > 0.0))
        throw AllZeroStack("training diagrams carry no positive persistence");

      const int m = cfg.pi_grid * cfg.pi_grid;
      outcome.sampler.grid_side = cfg.pi_grid;
      std::vector<Matrix> train_sampled(cfg.directions);

      // one direction at a time: build the stack, fit, keep the sampled rows
      for (int k = 0; k < cfg.directions; ++k) {
        Matrix stack(m, n_train);
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
        for (int j = 0; j < n_train; ++j) {
          const auto pi = record_pi(*train_recs[j], k, outcome.pi_config, false);
          for (int r = 0; r < m; ++r) stack(r, j) = pi.values[r];
        }
        auto pivots = fit_direction(stack);
        Matrix sampled(static_cast<int>(pivots.size()), n_train);
        for (std::size_t r = 0; r < pivots.size(); ++r)
          for (int j = 0; j < n_train; ++j) sampled(static_cast<int>(r), j) = stack(pivots[r], j);
        train_sampled[k] = std::move(sampled);
        outcome.sampler.pivot_indices.push_back(std::move(pivots));
      }

      const int dim = outcome.sampler.feature_length();
      train_x = Matrix(n_train, dim);
      for (int j = 0; j < n_train; ++j) {
        int at = 0;
        for (int k = 0; k < cfg.directions; ++k)
          for (int r = 0; r < train_sampled[k].rows; ++r) train_x(j, at++) = train_sampled[k](r, j);
      }

      test_x = Matrix(n_test, dim);
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
      for (int i = 0; i < n_test; ++i) {
        std::vector<PersistenceImage> pis;
        pis.reserve(cfg.directions);
        for (int k = 0; k < cfg.directions; ++k)
          pis.push_back(record_pi(*test_recs[i], k, outcome.pi_config, false));
        const auto features = apply_sampler(outcome.sampler, pis);
        std::copy(features.begin(), features.end(), test_x.row(i));
      }
    }

    std::vector<int> train_y(n_train), test_y(n_test);
    for (int i = 0; i < n_train; ++i) train_y[i] = train_recs[i]->class_index;
    for (int i = 0; i < n_test; ++i) test_y[i] = test_recs[i]->class_index;

    outcome.model = init_model(cfg.kind, train_x.cols, num_classes,
                               derive_seed(cfg.seed, 0x1000 + fold));
    outcome.model.class_labels = classes;
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.seed, 0x2000 + fold);
    tc.parallel = cfg.parallel;
    train(outcome.model, train_x, train_y, tc);

    std::vector<int> predictions(n_test);
    for (int i = 0; i < n_test; ++i) {
      predictions[i] =
          predict(outcome.model, std::span<const double>(test_x.row(i), test_x.cols)).class_index;
    }
    outcome.metrics = compute_metrics(predictions, test_y, classes);

    fold_acc.push_back(outcome.metrics.accuracy);
    fold_f1.push_back(outcome.metrics.weighted_f1);
    fold_prec.push_back(outcome.metrics.weighted_precision);
    fold_rec.push_back(outcome.metrics.weighted_recall);
    result.folds.push_back(std::move(outcome));
  }

  result.accuracy = aggregate_of(fold_acc);
  result.weighted_f1 = aggregate_of(fold_f1);
  result.weighted_precision = aggregate_of(fold_prec);
  result.weighted_recall = aggregate_of(fold_rec);
  return result;
}

}  // namespace toporec
