#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "toporec/experiment.hpp"
#include "toporec/linalg.hpp"
#include "toporec/rng.hpp"
#include "toporec/synthetic.hpp"
#include "toporec/vectorize.hpp"

using namespace toporec;

namespace {

double time_of(const std::function<void()>& fn, int repeats) {
  fn();  // warm up
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count() / repeats;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-34s %10.4f s %10.4f s %8.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  int repeats = 3;
  if (argc > 1) repeats = std::max(1, std::atoi(argv[1]));
  std::printf("threads available: %d, repeats: %d\n", omp_get_max_threads(), repeats);
  std::printf("%-34s %12s %12s %9s\n", "kernel", "serial", "parallel", "speedup");

  // diagram extraction over masks x directions
  const auto ds = make_synthetic_dataset({.classes = 6, .per_class = 8, .side = 96, .seed = 2});
  const auto dirs = make_directions(8);
  row("extract_diagrams (48 masks x4 x8)",
      time_of([&] { extract_diagrams(ds.masks, ds.labels, dirs, true, false); }, repeats),
      time_of([&] { extract_diagrams(ds.masks, ds.labels, dirs, true, true); }, repeats));

  // persistence image kernel vs dense serial reference
  Rng rng(5);
  PersistenceDiagram pd;
  pd.h_infinity = 120.0;
  for (int i = 0; i < 60; ++i) {
    const double b = rng.uniform(0.0, 90.0);
    pd.pairs.push_back({b, b + rng.uniform(0.0, 30.0)});
  }
  PersistenceImageConfig cfg;
  cfg.grid_side = 50;
  cfg.spread = 10.0;
  cfg.birth_hi = 120.0;
  cfg.pers_hi = 40.0;
  cfg.weight_pmax = 30.0;
  row("persistence_image 50x50, 60 pts",
      time_of([&] { persistence_image_serial(pd, cfg); }, repeats * 10),
      time_of([&] { persistence_image(pd, cfg, true); }, repeats * 10));

  // dense products at classifier shapes
  Matrix a(512, 512), b(512, 512), c(512, 512);
  for (auto& v : a.data) v = rng.uniform(-1.0, 1.0);
  for (auto& v : b.data) v = rng.uniform(-1.0, 1.0);
  row("gemm_nn 512x512x512",
      time_of([&] { gemm_nn_serial(a, b, c); }, repeats),
      time_of([&] { gemm_nn(a, b, c, true); }, repeats));
  Matrix xt(2500, 640), gram(2500, 2500);
  for (auto& v : xt.data) v = rng.uniform(0.0, 1.0);
  row("gram 2500x2500 from 640 cols",
      time_of([&] { gemm_nt_serial(xt, xt, gram); }, 1),
      time_of([&] { gemm_nt(xt, xt, gram, true); }, 1));
  return 0;
}
