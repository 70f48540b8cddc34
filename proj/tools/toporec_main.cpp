#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "toporec/errors.hpp"
#include "toporec/experiment.hpp"
#include "toporec/features_io.hpp"
#include "toporec/vectorize.hpp"

namespace fs = std::filesystem;
using namespace toporec;

namespace {

struct CommonOpts {
  int threads = 0;  // 0 = runtime default
};

void apply_threads(const CommonOpts& opts) {
  if (opts.threads > 0) omp_set_num_threads(opts.threads);
}

struct LoadedDataset {
  std::vector<BinaryMask> masks;
  std::vector<int> labels;
  std::vector<std::string> classes;
};

LoadedDataset load_dataset(const fs::path& data, int size, int threshold) {
  DatasetManifest manifest = load_manifest(data);
  LoadedDataset ds;
  ds.classes = manifest.classes;
  ds.masks.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) {
    BinaryMask mask = normalize_mask(load_mask(entry.path, threshold), size);
    mask.label = entry.label;
    ds.masks.push_back(std::move(mask));
    ds.labels.push_back(manifest.class_index(entry.label));
  }
  return ds;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_extract(const fs::path& data, const fs::path& out, int directions, int size,
                int threshold, const std::string& kind_name, int pi_grid, double pi_spread,
                bool augment, const CommonOpts& common) {
  apply_threads(common);
  const FeatureKind kind = feature_kind_from_name(kind_name);
  if (kind == FeatureKind::sparse_pi)
    throw Error("extract produces pd0, pi or amplitude features; sparse-pi comes from train/eval");

  LoadedDataset ds = load_dataset(data, size, threshold);
  const auto dirs = make_directions(directions);
  auto records = extract_diagrams(ds.masks, ds.labels, dirs, augment, true);

  FeatureFile file;
  file.directions = static_cast<std::uint32_t>(directions);
  file.classes = ds.classes;
  file.kind = kind;
  file.meta["directions"] = std::to_string(directions);
  file.meta["size"] = std::to_string(size);
  file.meta["threshold"] = std::to_string(threshold);
  file.meta["augment"] = augment ? "1" : "0";

  if (kind == FeatureKind::pd0) {
    file.dims = 0;
    for (auto& rec : records) {
      FeatureRecord fr;
      fr.class_index = static_cast<std::uint32_t>(rec.class_index);
      fr.sample_id = rec.sample_id;
      fr.rot_id = rec.rot_id;
      fr.diagrams = std::move(rec.pds);
      file.records.push_back(std::move(fr));
    }
  } else if (kind == FeatureKind::amplitude) {
    file.dims = static_cast<std::uint32_t>(directions);
    for (const auto& rec : records) {
      FeatureRecord fr;
      fr.class_index = static_cast<std::uint32_t>(rec.class_index);
      fr.sample_id = rec.sample_id;
      fr.rot_id = rec.rot_id;
      fr.values = amplitude_vector(rec.pds);
      file.records.push_back(std::move(fr));
    }
  } else {  // pi: ranges fitted on the extracted set itself (standalone mode)
    std::vector<const SampleDiagrams*> all;
    for (const auto& rec : records) all.push_back(&rec);
    const PersistenceImageConfig cfg = fit_pi_config(all, pi_grid, pi_spread);
    if (!(cfg.weight_pmax > 0.0)) throw AllZeroStack("no positive persistence in this dataset");
    file.dims = static_cast<std::uint32_t>(directions * pi_grid * pi_grid);
    file.meta["pi_grid"] = std::to_string(pi_grid);
    file.meta["pi_spread"] = fmt(pi_spread);
    file.meta["birth_hi"] = fmt(cfg.birth_hi);
    file.meta["pers_hi"] = fmt(cfg.pers_hi);
    file.meta["weight_pmax"] = fmt(cfg.weight_pmax);
    for (const auto& rec : records) {
      FeatureRecord fr;
      fr.class_index = static_cast<std::uint32_t>(rec.class_index);
      fr.sample_id = rec.sample_id;
      fr.rot_id = rec.rot_id;
      fr.values.reserve(file.dims);
      for (int k = 0; k < directions; ++k) {
        const auto pi = persistence_image(rec.pds[k], cfg, true);
        fr.values.insert(fr.values.end(), pi.values.begin(), pi.values.end());
      }
      file.records.push_back(std::move(fr));
    }
  }
  write_features(out, file);
  std::cout << "wrote " << file.records.size() << " " << feature_kind_name(kind)
            << " records to " << out.string() << "\n";
  return 0;
}

int cmd_fit_sampler(const fs::path& features_path, const fs::path& out) {
  FeatureFile file = read_features(features_path);
  if (file.kind != FeatureKind::pi) throw Error("fit-sampler needs a pi feature file");
  const int d = static_cast<int>(file.directions);
  const int grid = std::stoi(file.meta.at("pi_grid"));
  const int m = grid * grid;
  const int n = static_cast<int>(file.records.size());

  std::vector<Matrix> stacks(d, Matrix(m, n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < d; ++k)
      for (int r = 0; r < m; ++r)
        stacks[k](r, j) = file.records[j].values[static_cast<std::size_t>(k) * m + r];

  SparseSampler sampler = fit_sampler(stacks, grid);
  write_sampler(out, sampler);
  std::cout << "sampler: " << sampler.feature_length() << " pixels across " << d
            << " directions -> " << out.string() << "\n";
  return 0;
}

std::vector<SampleDiagrams> diagrams_of(const FeatureFile& file) {
  if (file.kind != FeatureKind::pd0) throw Error("expected a pd0 feature file");
  std::vector<SampleDiagrams> out;
  out.reserve(file.records.size());
  for (const auto& rec : file.records) {
    SampleDiagrams sd;
    sd.sample_id = rec.sample_id;
    sd.rot_id = rec.rot_id;
    sd.class_index = static_cast<int>(rec.class_index);
    sd.pds = rec.diagrams;
    out.push_back(std::move(sd));
  }
  return out;
}

int cmd_train(const fs::path& features_path, const std::string& kind_name, int folds,
              std::uint64_t seed, const fs::path& out_dir, int pi_grid, double pi_spread,
              int epochs, int batch, const std::string& schedule, const CommonOpts& common) {
  apply_threads(common);
  FeatureFile file = read_features(features_path);
  auto diagrams = diagrams_of(file);

  ExperimentConfig cfg;
  cfg.directions = static_cast<int>(file.directions);
  cfg.pi_grid = pi_grid;
  cfg.pi_spread = pi_spread;
  cfg.folds = folds;
  cfg.seed = seed;
  cfg.kind = kind_name == "amplitude" ? ModelKind::amplitude : ModelKind::sparse_pi;
  cfg.parallel = common.threads != 1;
  cfg.train.epochs = epochs;
  cfg.train.batch_size = batch;
  if (schedule == "final-1e-6")
    cfg.train.lr_schedule = schedule_final_1e6();
  else if (schedule != "final-1e-4")
    throw Error("unknown schedule preset: " + schedule);
  if (epochs != 800) {
    // keep the phase proportions 5:1:1:1 when the epoch budget changes
    cfg.train.lr_schedule[0].epochs = (epochs * 5 + 4) / 8;
    const int rest = (epochs - cfg.train.lr_schedule[0].epochs) / 3;
    cfg.train.lr_schedule[1].epochs = rest;
    cfg.train.lr_schedule[2].epochs = rest;
    cfg.train.lr_schedule[3].epochs = epochs - cfg.train.lr_schedule[0].epochs - 2 * rest;
  }

  ExperimentResult result = run_experiment(diagrams, file.classes, cfg);
  if (!result.plan.warning.empty()) std::cerr << "warning: " << result.plan.warning << "\n";

  fs::create_directories(out_dir);
  nlohmann::json agg;
  agg["kind"] = kind_name;
  agg["folds"] = folds;
  agg["seed"] = seed;
  agg["directions"] = cfg.directions;
  agg["pi_grid"] = pi_grid;
  agg["pi_spread"] = pi_spread;
  agg["epochs"] = epochs;
  agg["batch"] = batch;
  agg["schedule"] = schedule;
  agg["accuracy"] = {{"mean", result.accuracy.mean}, {"std", result.accuracy.stddev}};
  agg["weighted_f1"] = {{"mean", result.weighted_f1.mean}, {"std", result.weighted_f1.stddev}};
  agg["weighted_precision"] = {{"mean", result.weighted_precision.mean},
                               {"std", result.weighted_precision.stddev}};
  agg["weighted_recall"] = {{"mean", result.weighted_recall.mean},
                            {"std", result.weighted_recall.stddev}};

  for (std::size_t f = 0; f < result.folds.size(); ++f) {
    const auto& fold = result.folds[f];
    const std::string tag = "fold" + std::to_string(f);
    write_model(out_dir / ("model_" + tag + ".bin"), fold.model);
    if (cfg.kind == ModelKind::sparse_pi)
      write_sampler(out_dir / ("sampler_" + tag + ".bin"), fold.sampler);
    write_metrics_json(out_dir / ("metrics_" + tag + ".json"), fold.metrics);
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fold.fit_input_hash));
    agg["fit_input_hash"].push_back(hash);
    agg["fold_accuracy"].push_back(fold.metrics.accuracy);
  }
  std::ofstream agg_out(out_dir / "aggregate.json");
  agg_out << agg.dump(2) << "\n";

  std::printf("%s: accuracy %.4f +- %.4f, weighted F1 %.4f +- %.4f (%d folds)\n",
              kind_name.c_str(), result.accuracy.mean, result.accuracy.stddev,
              result.weighted_f1.mean, result.weighted_f1.stddev, folds);
  return 0;
}

int cmd_eval(const fs::path& model_path, const fs::path& features_path, const fs::path& report,
             const fs::path& sampler_path) {
  MlpModel model = read_model(model_path);
  FeatureFile file = read_features(features_path);

  std::vector<std::vector<double>> vectors;
  if (file.kind == FeatureKind::amplitude || file.kind == FeatureKind::sparse_pi) {
    for (const auto& rec : file.records) vectors.push_back(rec.values);
  } else if (file.kind == FeatureKind::pi) {
    if (sampler_path.empty()) throw Error("pi features need --sampler to evaluate");
    SparseSampler sampler = read_sampler(sampler_path);
    const int m = sampler.grid_side * sampler.grid_side;
    if (file.dims != static_cast<std::uint32_t>(sampler.directions() * m))
      throw ShapeMismatch("pi feature dims do not match sampler");
    for (const auto& rec : file.records) {
      std::vector<double> v;
      v.reserve(sampler.feature_length());
      for (int k = 0; k < sampler.directions(); ++k)
        for (std::uint32_t pivot : sampler.pivot_indices[k])
          v.push_back(rec.values[static_cast<std::size_t>(k) * m + pivot]);
      vectors.push_back(std::move(v));
    }
  } else {
    throw Error("eval needs vector features (amplitude, sparse-pi, or pi with --sampler)");
  }

  std::vector<int> predictions, truths;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (static_cast<int>(vectors[i].size()) != model.input_dim())
      throw DimMismatch("feature length " + std::to_string(vectors[i].size()) +
                        " vs model input " + std::to_string(model.input_dim()));
    predictions.push_back(predict(model, vectors[i]).class_index);
    truths.push_back(static_cast<int>(file.records[i].class_index));
  }
  const MetricsReport metrics = compute_metrics(predictions, truths, file.classes);
  write_metrics_json(report, metrics);
  std::printf("accuracy %.4f, weighted F1 %.4f on %zu records -> %s\n", metrics.accuracy,
              metrics.weighted_f1, vectors.size(), report.string().c_str());
  return 0;
}

int cmd_pd(const fs::path& mask_path, int direction, int directions, int size, int threshold,
           const fs::path& out_path) {
  BinaryMask mask = load_mask(mask_path, threshold);
  if (size > 0) mask = normalize_mask(mask, size);
  const auto dirs = make_directions(directions);
  if (direction < 0 || direction >= directions) throw Error("direction index out of range");
  const auto pd = compute_pd0(height_field(mask, dirs[direction]));

  std::ostringstream text;
  write_pd_text(text, {pd}, mask.source_id);
  if (out_path.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write " + out_path.string());
    out << text.str();
  }
  return 0;
}

int cmd_report(const fs::path& runs, const std::string& format, const fs::path& out_path) {
  std::vector<std::pair<std::string, nlohmann::json>> found;
  auto try_add = [&](const fs::path& dir) {
    const auto agg = dir / "aggregate.json";
    if (fs::exists(agg)) {
      std::ifstream in(agg);
      nlohmann::json j;
      in >> j;
      found.emplace_back(dir.filename().string(), std::move(j));
    }
  };
  try_add(runs);
  if (fs::is_directory(runs)) {
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(runs))
      if (entry.is_directory()) subdirs.push_back(entry.path());
    std::sort(subdirs.begin(), subdirs.end());
    for (const auto& dir : subdirs) try_add(dir);
  }
  if (found.empty()) throw Error("no aggregate.json under " + runs.string());

  const char* metrics[4] = {"weighted_f1", "weighted_precision", "weighted_recall", "accuracy"};
  const char* rows[4] = {"F1 score (w)", "Precision (w)", "Recall (w)", "Accuracy"};

  std::ostringstream table;
  auto cell = [](const nlohmann::json& j, const char* metric) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f+-%.2f", j.at(metric).at("mean").get<double>(),
                  j.at(metric).at("std").get<double>());
    return std::string(buf);
  };
  if (format == "csv") {
    table << "metric";
    for (const auto& [name, j] : found) table << "," << name;
    table << "\n";
    for (int r = 0; r < 4; ++r) {
      table << rows[r];
      for (const auto& [name, j] : found) table << "," << cell(j, metrics[r]);
      table << "\n";
    }
  } else if (format == "md") {
    table << "| Metric |";
    for (const auto& [name, j] : found) table << " " << name << " |";
    table << "\n|---|";
    for (std::size_t i = 0; i < found.size(); ++i) table << "---|";
    table << "\n";
    for (int r = 0; r < 4; ++r) {
      table << "| " << rows[r] << " |";
      for (const auto& [name, j] : found) table << " " << cell(j, metrics[r]) << " |";
      table << "\n";
    }
  } else {
    throw Error("unknown report format: " + format);
  }
  if (out_path.empty()) {
    std::cout << table.str();
  } else {
    std::ofstream out(out_path);
    out << table.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shape recognition from binary masks via persistent features"};
  app.set_config("--config", "", "key=value config file; command-line flags win");
  app.require_subcommand(1);

  CommonOpts common;

  // extract
  auto* extract = app.add_subcommand("extract", "masks -> diagrams or vector features");
  fs::path ex_data, ex_out;
  int ex_directions = 8, ex_size = 125, ex_threshold = 128, ex_grid = 50;
  double ex_spread = 10.0;
  std::string ex_kind = "pd0";
  bool ex_augment = true;
  extract->add_option("--data", ex_data, "dataset root (class dirs) or manifest CSV")->required();
  extract->add_option("--out", ex_out, "output feature file")->required();
  extract->add_option("--directions", ex_directions, "height function directions");
  extract->add_option("--size", ex_size, "normalized mask side");
  extract->add_option("--threshold", ex_threshold, "binarization threshold");
  extract->add_option("--kind", ex_kind, "pd0 | pi | amplitude");
  extract->add_option("--pi-grid", ex_grid, "persistence image grid side");
  extract->add_option("--pi-spread", ex_spread, "persistence image spread");
  extract->add_flag("--augment,!--no-augment", ex_augment, "include quarter-turn rotations");
  extract->add_option("--threads", common.threads, "worker threads (0 = default)");

  // fit-sampler
  auto* fit = app.add_subcommand("fit-sampler", "learn sparse PI pixel sets from pi features");
  fs::path fit_features, fit_out;
  fit->add_option("--features", fit_features, "pi feature file")->required();
  fit->add_option("--out", fit_out, "output sampler file")->required();

  // train
  auto* train = app.add_subcommand("train", "five-fold train/test from pd0 features");
  fs::path tr_features, tr_out;
  std::string tr_kind = "sparse-pi", tr_schedule = "final-1e-4";
  int tr_folds = 5, tr_grid = 50, tr_epochs = 800, tr_batch = 64;
  double tr_spread = 10.0;
  std::uint64_t tr_seed = 0;
  train->add_option("--features", tr_features, "pd0 feature file")->required();
  train->add_option("--kind", tr_kind, "sparse-pi | amplitude")
      ->check(CLI::IsMember({"sparse-pi", "amplitude"}));
  train->add_option("--folds", tr_folds, "fold count");
  train->add_option("--seed", tr_seed, "experiment seed");
  train->add_option("--out", tr_out, "output run directory")->required();
  train->add_option("--pi-grid", tr_grid, "persistence image grid side");
  train->add_option("--pi-spread", tr_spread, "persistence image spread");
  train->add_option("--epochs", tr_epochs, "training epochs");
  train->add_option("--batch", tr_batch, "mini-batch size");
  train->add_option("--schedule", tr_schedule, "final-1e-4 | final-1e-6");
  train->add_option("--threads", common.threads, "worker threads (0 = default)");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a model file on a feature file");
  fs::path ev_model, ev_features, ev_report, ev_sampler;
  eval->add_option("--model", ev_model, "model file")->required();
  eval->add_option("--features", ev_features, "feature file")->required();
  eval->add_option("--report", ev_report, "metrics JSON output")->required();
  eval->add_option("--sampler", ev_sampler, "sampler file (needed for pi features)");

  // pd
  auto* pd = app.add_subcommand("pd", "dump the persistence diagram of one mask");
  fs::path pd_mask, pd_out;
  int pd_direction = 0, pd_directions = 8, pd_size = 0, pd_threshold = 128;
  pd->add_option("--mask", pd_mask, "mask image (PNG or PGM)")->required();
  pd->add_option("--direction", pd_direction, "direction index")->required();
  pd->add_option("--directions", pd_directions, "direction count");
  pd->add_option("--size", pd_size, "normalize to this side first (0 = raw)");
  pd->add_option("--threshold", pd_threshold, "binarization threshold");
  pd->add_option("--out", pd_out, "output file (default stdout)");

  // report
  auto* report = app.add_subcommand("report", "tabulate run directories");
  fs::path rp_runs, rp_out;
  std::string rp_format = "md";
  report->add_option("--runs", rp_runs, "run directory (or parent of several)")->required();
  report->add_option("--format", rp_format, "csv | md")->check(CLI::IsMember({"csv", "md"}));
  report->add_option("--out", rp_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (extract->parsed())
      return cmd_extract(ex_data, ex_out, ex_directions, ex_size, ex_threshold, ex_kind, ex_grid,
                         ex_spread, ex_augment, common);
    if (fit->parsed()) return cmd_fit_sampler(fit_features, fit_out);
    if (train->parsed())
      return cmd_train(tr_features, tr_kind, tr_folds, tr_seed, tr_out, tr_grid, tr_spread,
                       tr_epochs, tr_batch, tr_schedule, common);
    if (eval->parsed()) return cmd_eval(ev_model, ev_features, ev_report, ev_sampler);
    if (pd->parsed())
      return cmd_pd(pd_mask, pd_direction, pd_directions, pd_size, pd_threshold, pd_out);
    if (report->parsed()) return cmd_report(rp_runs, rp_format, rp_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
