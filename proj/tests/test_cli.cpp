#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "toporec/features_io.hpp"
#include "toporec/metrics.hpp"
#include "toporec/persistence.hpp"
#include "toporec/synthetic.hpp"

using namespace toporec;
namespace fs = std::filesystem;

namespace {

#ifndef TOPOREC_CLI_PATH
#define TOPOREC_CLI_PATH "./toporec"
#endif

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TOPOREC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path workspace() {
  const auto dir = fs::temp_directory_path() / "toporec_cli_tests";
  return dir;
}

}  // namespace

TEST_CASE("cli end-to-end: extract, train, eval, pd, report") {
  const auto ws = workspace();
  fs::remove_all(ws);
  fs::create_directories(ws);
  write_synthetic_dataset(ws / "data",
                          {.classes = 3, .per_class = 5, .side = 28, .seed = 17});

  // usage error -> 1
  CHECK(run_cli("extract --data") == 1);
  CHECK(run_cli("nonsense") == 1);
  // data error -> 2
  CHECK(run_cli("extract --data " + (ws / "nope").string() + " --out " +
                (ws / "x.pd0").string()) == 2);

  const std::string features = (ws / "features.pd0").string();
  CHECK(run_cli("extract --data " + (ws / "data").string() + " --out " + features +
                " --size 32 --directions 8") == 0);
  const auto file = read_features(features);
  CHECK(file.kind == FeatureKind::pd0);
  CHECK(file.records.size() == 3 * 5 * 4);
  CHECK(file.classes.size() == 3);

  const std::string run_dir = (ws / "run_amplitude").string();
  CHECK(run_cli("train --features " + features + " --kind amplitude --folds 5 --seed 3 --out " +
                run_dir + " --epochs 40 --batch 16") == 0);
  CHECK(fs::exists(fs::path(run_dir) / "model_fold0.bin"));
  CHECK(fs::exists(fs::path(run_dir) / "metrics_fold4.json"));
  CHECK(fs::exists(fs::path(run_dir) / "aggregate.json"));

  // vector features for eval
  const std::string amp = (ws / "features.amp").string();
  CHECK(run_cli("extract --data " + (ws / "data").string() + " --out " + amp +
                " --size 32 --directions 8 --kind amplitude --no-augment") == 0);
  const std::string report = (ws / "eval.json").string();
  CHECK(run_cli("eval --model " + run_dir + "/model_fold0.bin --features " + amp + " --report " +
                report) == 0);
  const auto metrics = read_metrics_json(report);
  CHECK(metrics.accuracy >= 0.0);
  CHECK(metrics.accuracy <= 1.0);

  // pi features + fit-sampler + eval through the sampler
  const std::string pi = (ws / "features.pi").string();
  CHECK(run_cli("extract --data " + (ws / "data").string() + " --out " + pi +
                " --size 32 --directions 8 --kind pi --pi-grid 12 --pi-spread 3") == 0);
  const std::string sampler = (ws / "sampler.bin").string();
  CHECK(run_cli("fit-sampler --features " + pi + " --out " + sampler) == 0);
  CHECK(fs::exists(sampler));

  // pd dump parses back
  fs::path sample_mask;
  for (const auto& entry : fs::recursive_directory_iterator(ws / "data"))
    if (entry.path().extension() == ".pgm") {
      sample_mask = entry.path();
      break;
    }
  const std::string pd_out = (ws / "pd.txt").string();
  CHECK(run_cli("pd --mask " + sample_mask.string() + " --direction 3 --size 32 --out " +
                pd_out) == 0);
  std::ifstream pd_in(pd_out);
  const auto pds = read_pd_text(pd_in);
  REQUIRE(pds.size() == 1);
  CHECK(pds[0].direction_index == 3);
  CHECK(!pds[0].pairs.empty());
  CHECK(run_cli("pd --mask " + sample_mask.string() + " --direction 9") == 2);

  // report over the run directory, both formats
  CHECK(run_cli("report --runs " + run_dir + " --format csv --out " + (ws / "t.csv").string()) ==
        0);
  CHECK(run_cli("report --runs " + ws.string() + " --format md --out " + (ws / "t.md").string()) ==
        0);
  std::stringstream md;
  md << std::ifstream((ws / "t.md").string()).rdbuf();
  CHECK(md.str().find("Accuracy") != std::string::npos);
  CHECK(md.str().find("run_amplitude") != std::string::npos);
}

TEST_CASE("cli config file supplies defaults that flags override") {
  const auto ws = workspace();
  fs::create_directories(ws);
  write_synthetic_dataset(ws / "data2", {.classes = 2, .per_class = 2, .side = 24, .seed = 23});
  const auto cfg_path = ws / "toporec.cfg";
  std::ofstream(cfg_path) << "[extract]\ndata = \"" << (ws / "data2").string()
                          << "\"\nout = \"" << (ws / "cfg.pd0").string()
                          << "\"\nsize = 24\ndirections = 4\n";
  CHECK(run_cli("--config " + cfg_path.string() + " extract") == 0);
  const auto file = read_features(ws / "cfg.pd0");
  CHECK(file.directions == 4);
  CHECK(run_cli("--config " + cfg_path.string() + " extract --directions 8 --out " +
                (ws / "cfg8.pd0").string()) == 0);
  CHECK(read_features(ws / "cfg8.pd0").directions == 8);
}
