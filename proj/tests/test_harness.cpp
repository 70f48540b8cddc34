#include <doctest.h>

#include <filesystem>
#include <set>

#include "toporec/errors.hpp"
#include "toporec/experiment.hpp"
#include "toporec/features_io.hpp"
#include "toporec/synthetic.hpp"
#include "toporec/vectorize.hpp"

using namespace toporec;
namespace fs = std::filesystem;

TEST_CASE("compute_metrics on the worked 2x2 example") {
  // truths [a,a,b,b], preds [a,b,b,b]
  const std::vector<std::string> classes{"a", "b"};
  const auto r = compute_metrics({0, 1, 1, 1}, {0, 0, 1, 1}, classes);
  CHECK(r.accuracy == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r.precision[0] == doctest::Approx(1.0));
  CHECK(r.recall[0] == doctest::Approx(0.5));
  CHECK(r.f1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.precision[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.recall[1] == doctest::Approx(1.0));
  CHECK(r.f1[1] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r.weighted_f1 == doctest::Approx(11.0 / 15.0).epsilon(1e-12));
  CHECK(r.confusion[0][0] == 1);
  CHECK(r.confusion[0][1] == 1);
  CHECK(r.support == std::vector<int>{2, 2});
}

TEST_CASE("perfect predictions give all-ones metrics") {
  const std::vector<std::string> classes{"x", "y", "z"};
  const auto r = compute_metrics({0, 1, 2, 0}, {0, 1, 2, 0}, classes);
  CHECK(r.accuracy == 1.0);
  CHECK(r.weighted_f1 == doctest::Approx(1.0));
  CHECK(r.weighted_precision == doctest::Approx(1.0));
  CHECK(r.weighted_recall == doctest::Approx(1.0));
}

TEST_CASE("zero-denominator convention and accuracy == weighted recall") {
  const std::vector<std::string> classes{"a", "b", "c"};
  // class c never predicted; class b truth absent
  const auto r = compute_metrics({0, 0, 1}, {0, 2, 2}, classes);
  CHECK(r.precision[2] == 0.0);
  CHECK(r.recall[1] == 0.0);
  CHECK(r.accuracy == doctest::Approx(r.weighted_recall).epsilon(1e-12));
  CHECK_THROWS_AS(compute_metrics({0}, {0, 1}, classes), LengthMismatch);
}

TEST_CASE("metrics json round trip") {
  const std::vector<std::string> classes{"a", "b"};
  const auto r = compute_metrics({0, 1, 1, 1}, {0, 0, 1, 1}, classes);
  const auto path = fs::temp_directory_path() / "toporec_metrics.json";
  write_metrics_json(path, r);
  const auto back = read_metrics_json(path);
  CHECK(back.accuracy == r.accuracy);
  CHECK(back.weighted_f1 == r.weighted_f1);
  CHECK(back.confusion == r.confusion);
  CHECK(back.classes == r.classes);
}

TEST_CASE("stratified folds split 20-per-class into 5x4") {
  std::vector<int> labels;
  for (int cls = 0; cls < 70; ++cls)
    for (int i = 0; i < 20; ++i) labels.push_back(cls);
  const auto plan = make_folds(labels, 70, 5, 123);
  CHECK(plan.warning.empty());
  std::vector<int> fold_sizes(5, 0);
  for (int f : plan.assignment) {
    REQUIRE(f >= 0);
    REQUIRE(f < 5);
    ++fold_sizes[f];
  }
  for (int s : fold_sizes) CHECK(s == 280);
  for (int cls = 0; cls < 70; ++cls)
    for (int f = 0; f < 5; ++f) CHECK(plan.class_counts[cls][f] == 4);

  const auto again = make_folds(labels, 70, 5, 123);
  CHECK(again.assignment == plan.assignment);
  const auto other = make_folds(labels, 70, 5, 124);
  CHECK(other.assignment != plan.assignment);
}

TEST_CASE("five samples of one class spread one per fold") {
  const auto plan = make_folds({0, 0, 0, 0, 0}, 1, 5, 9);
  std::set<int> folds(plan.assignment.begin(), plan.assignment.end());
  CHECK(folds.size() == 5);
}

TEST_CASE("indivisible classes fall back with a warning") {
  const auto plan = make_folds({0, 0, 0, 0, 0, 0, 0}, 1, 5, 9);
  CHECK(!plan.warning.empty());
  std::vector<int> sizes(5, 0);
  for (int f : plan.assignment) ++sizes[f];
  for (int s : sizes) CHECK(s >= 1);
}

TEST_CASE("feature file round trips both record kinds") {
  const auto dir = fs::temp_directory_path();
  const auto ds = make_synthetic_dataset({.classes = 2, .per_class = 2, .side = 24, .seed = 3});
  const auto dirs = make_directions(4);
  const auto records = extract_diagrams(ds.masks, ds.labels, dirs, true, false);

  FeatureFile file;
  file.kind = FeatureKind::pd0;
  file.directions = 4;
  file.classes = ds.class_names;
  file.meta["note"] = "unit";
  for (const auto& rec : records) {
    FeatureRecord fr;
    fr.class_index = static_cast<std::uint32_t>(rec.class_index);
    fr.sample_id = rec.sample_id;
    fr.rot_id = rec.rot_id;
    fr.diagrams = rec.pds;
    file.records.push_back(std::move(fr));
  }
  write_features(dir / "t.pd0", file);
  const auto back = read_features(dir / "t.pd0");
  CHECK(back.kind == FeatureKind::pd0);
  CHECK(back.classes == file.classes);
  CHECK(back.meta.at("note") == "unit");
  REQUIRE(back.records.size() == file.records.size());
  for (std::size_t i = 0; i < back.records.size(); ++i) {
    const auto& a = back.records[i];
    const auto& b = file.records[i];
    CHECK(a.sample_id == b.sample_id);
    CHECK(a.rot_id == b.rot_id);
    REQUIRE(a.diagrams.size() == b.diagrams.size());
    for (std::size_t k = 0; k < a.diagrams.size(); ++k) {
      CHECK(a.diagrams[k].h_infinity == b.diagrams[k].h_infinity);
      REQUIRE(a.diagrams[k].pairs.size() == b.diagrams[k].pairs.size());
      for (std::size_t p = 0; p < a.diagrams[k].pairs.size(); ++p) {
        CHECK(a.diagrams[k].pairs[p].birth == b.diagrams[k].pairs[p].birth);
        CHECK(a.diagrams[k].pairs[p].death == b.diagrams[k].pairs[p].death);
      }
    }
  }

  FeatureFile vec;
  vec.kind = FeatureKind::amplitude;
  vec.directions = 4;
  vec.dims = 4;
  vec.classes = ds.class_names;
  vec.records.push_back({0, 0, 0, {1.5, 2.5, -3.0, 0.0}, {}});
  write_features(dir / "t.amp", vec);
  const auto vback = read_features(dir / "t.amp");
  CHECK(vback.records[0].values == vec.records[0].values);
}

TEST_CASE("extract_diagrams is augmentation-aware and order-stable") {
  const auto ds = make_synthetic_dataset({.classes = 2, .per_class = 3, .side = 24, .seed = 5});
  const auto dirs = make_directions(8);
  const auto serial = extract_diagrams(ds.masks, ds.labels, dirs, true, false);
  const auto parallel = extract_diagrams(ds.masks, ds.labels, dirs, true, true);
  REQUIRE(serial.size() == ds.masks.size() * 4);
  REQUIRE(parallel.size() == serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].sample_id == parallel[i].sample_id);
    CHECK(serial[i].rot_id == parallel[i].rot_id);
    REQUIRE(serial[i].pds.size() == 8);
    for (int k = 0; k < 8; ++k) {
      REQUIRE(serial[i].pds[k].pairs.size() == parallel[i].pds[k].pairs.size());
      for (std::size_t p = 0; p < serial[i].pds[k].pairs.size(); ++p) {
        CHECK(serial[i].pds[k].pairs[p].birth == parallel[i].pds[k].pairs[p].birth);
        CHECK(serial[i].pds[k].pairs[p].death == parallel[i].pds[k].pairs[p].death);
      }
    }
  }
  // rotated records are direction-permuted originals, modulo the diagonal
  auto positive = [](const std::vector<PersistencePair>& pairs) {
    std::multiset<std::pair<double, double>> s;
    for (const auto& p : pairs)
      if (p.death > p.birth) s.emplace(p.birth, p.death);
    return s;
  };
  for (std::size_t s = 0; s < ds.masks.size(); ++s) {
    const auto& rot0 = serial[s * 4];
    const auto& rot1 = serial[s * 4 + 1];
    for (int k = 0; k < 8; ++k)
      CHECK(positive(rot1.pds[k].pairs) == positive(rot0.pds[(k + 2) % 8].pairs));
  }
}

namespace {

ExperimentConfig tiny_config(ModelKind kind) {
  ExperimentConfig cfg;
  cfg.directions = 8;
  cfg.pi_grid = 16;
  cfg.pi_spread = 4.0;
  cfg.folds = 2;
  cfg.seed = 11;
  cfg.kind = kind;
  cfg.train.epochs = 25;
  cfg.train.lr_schedule = {{15, 1e-2}, {5, 1e-3}, {5, 1e-4}};
  cfg.train.batch_size = 16;
  cfg.parallel = true;
  return cfg;
}

}  // namespace

TEST_CASE("run_experiment trains, evaluates, and fits on training folds only") {
  const auto ds = make_synthetic_dataset({.classes = 3, .per_class = 8, .side = 32, .seed = 21});
  const auto dirs = make_directions(8);
  const auto records = extract_diagrams(ds.masks, ds.labels, dirs, true, true);

  for (const ModelKind kind : {ModelKind::sparse_pi, ModelKind::amplitude}) {
    const auto cfg = tiny_config(kind);
    const auto result = run_experiment(records, ds.class_names, cfg);
    REQUIRE(result.folds.size() == 2);
    for (int f = 0; f < 2; ++f) {
      const auto& fold = result.folds[f];
      CHECK(fold.metrics.accuracy >= 0.0);
      CHECK(fold.metrics.accuracy <= 1.0);
      CHECK(fold.metrics.accuracy ==
            doctest::Approx(fold.metrics.weighted_recall).epsilon(1e-12));

      // audit: recompute the hash over non-test records, in diagram order
      std::uint64_t expected = 0xcbf29ce484222325ULL;
      for (const auto& rec : records) {
        if (result.plan.assignment[rec.sample_id] == f) continue;
        const std::uint32_t ids[2] = {rec.sample_id, rec.rot_id};
        expected = fnv1a64(ids, sizeof(ids), expected);
      }
      CHECK(fold.fit_input_hash == expected);
      for (auto sid : fold.test_sample_ids) CHECK(result.plan.assignment[sid] == f);
      if (kind == ModelKind::sparse_pi) {
        CHECK(fold.sampler.feature_length() == fold.model.input_dim());
        CHECK(fold.pi_config.weight_pmax > 0.0);
      } else {
        CHECK(fold.model.input_dim() == 8);
      }
    }
  }
}

TEST_CASE("run_experiment is deterministic end to end") {
  const auto ds = make_synthetic_dataset({.classes = 2, .per_class = 6, .side = 28, .seed = 31});
  const auto dirs = make_directions(8);
  const auto records = extract_diagrams(ds.masks, ds.labels, dirs, true, true);
  const auto cfg = tiny_config(ModelKind::sparse_pi);
  const auto a = run_experiment(records, ds.class_names, cfg);
  const auto b = run_experiment(records, ds.class_names, cfg);
  CHECK(a.accuracy.mean == b.accuracy.mean);
  CHECK(a.weighted_f1.mean == b.weighted_f1.mean);
  for (std::size_t f = 0; f < a.folds.size(); ++f) {
    CHECK(a.folds[f].sampler.pivot_indices == b.folds[f].sampler.pivot_indices);
    for (int l = 0; l < a.folds[f].model.trainable_layers(); ++l)
      CHECK(a.folds[f].model.weights[l].data == b.folds[f].model.weights[l].data);
  }
}

TEST_CASE("single-class dataset evaluates to accuracy 1.0") {
  const auto ds = make_synthetic_dataset({.classes = 1, .per_class = 6, .side = 24, .seed = 41});
  const auto dirs = make_directions(4);
  const auto records = extract_diagrams(ds.masks, ds.labels, dirs, true, false);
  auto cfg = tiny_config(ModelKind::amplitude);
  cfg.directions = 4;
  cfg.train.epochs = 3;
  cfg.train.lr_schedule = {{3, 1e-2}};
  const auto result = run_experiment(records, ds.class_names, cfg);
  CHECK(result.accuracy.mean == 1.0);
}

TEST_CASE("fit_pi_config spans the training pairs") {
  const auto ds = make_synthetic_dataset({.classes = 2, .per_class = 3, .side = 24, .seed = 51});
  const auto dirs = make_directions(4);
  const auto records = extract_diagrams(ds.masks, ds.labels, dirs, false, false);
  std::vector<const SampleDiagrams*> ptrs;
  for (const auto& r : records) ptrs.push_back(&r);
  const auto cfg = fit_pi_config(ptrs, 20, 4.0);
  CHECK(cfg.birth_lo == 0.0);
  CHECK(cfg.pers_lo == 0.0);
  double max_pers = 0.0, max_hinf = 0.0;
  for (const auto& r : records)
    for (const auto& pd : r.pds) {
      max_hinf = std::max(max_hinf, pd.h_infinity);
      for (const auto& p : pd.pairs) max_pers = std::max(max_pers, p.death - p.birth);
    }
  CHECK(cfg.birth_hi == max_hinf);
  CHECK(cfg.pers_hi == max_pers);
  CHECK(cfg.weight_pmax == max_pers);
}
