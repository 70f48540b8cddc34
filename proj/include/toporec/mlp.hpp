#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "toporec/linalg.hpp"

namespace toporec {

enum class ModelKind : std::uint32_t { amplitude = 0, sparse_pi = 1 };

struct LrPhase {
  int epochs = 0;
  double lr = 0.0;
};

// Piecewise-constant schedule: 0.01 for 500 epochs, then a decade down
// after each of the next two 100-epoch phases. The wording for the final
// 100 epochs admits two readings, so both are provided.
std::vector<LrPhase> schedule_final_1e4();  // ...., 1e-4, 1e-4 (default)
std::vector<LrPhase> schedule_final_1e6();  // ...., 1e-4, 1e-6

double learning_rate_at(const std::vector<LrPhase>& schedule, int epoch);  // 1-based

struct TrainConfig {
  int epochs = 800;
  std::vector<LrPhase> lr_schedule = schedule_final_1e4();
  int batch_size = 64;
  std::uint64_t seed = 0;
  bool parallel = false;  // distributes matrix product rows; update sequence unchanged
};

struct MlpModel {
  ModelKind kind = ModelKind::amplitude;
  std::vector<int> layer_dims;          // input, hidden..., classes
  std::vector<Matrix> weights;          // per layer, in x out
  std::vector<std::vector<double>> biases;
  std::vector<std::string> class_labels;
  std::uint64_t init_seed = 0;

  int input_dim() const { return layer_dims.front(); }
  int classes() const { return layer_dims.back(); }
  int trainable_layers() const { return static_cast<int>(weights.size()); }
};

// amplitude: [input, 64, classes]; sparse-pi: [input, 512, 256, 64, classes].
// Fan-in scaled uniform init (+-sqrt(3/fan_in)), zero biases, deterministic
// per seed.
MlpModel init_model(ModelKind kind, int input_dim, int classes, std::uint64_t seed);

// ReLU hidden layers, softmax output; returns class probabilities.
std::vector<double> forward(const MlpModel& model, std::span<const double> x);

struct Prediction {
  int class_index = 0;
  std::vector<double> probabilities;
};

// argmax of forward; ties go to the lowest class index.
Prediction predict(const MlpModel& model, std::span<const double> x);

struct TrainResult {
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch
};

// Adam (beta1 0.9, beta2 0.999, eps 1e-8) with the configured schedule and
// per-epoch seeded shuffling. Throws NonFiniteLoss if the loss diverges.
TrainResult train(MlpModel& model, const Matrix& features, const std::vector<int>& labels,
                  const TrainConfig& cfg);

// Mean batch loss and its gradients; exposed so tests can compare the
// analytic gradients against finite differences.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
};
double loss_and_gradients(const MlpModel& model, const Matrix& x, const std::vector<int>& labels,
                          Gradients& out, bool parallel);
double batch_loss(const MlpModel& model, const Matrix& x, const std::vector<int>& labels,
                  bool parallel);

void write_model(const std::filesystem::path& path, const MlpModel& model);
MlpModel read_model(const std::filesystem::path& path);

}  // namespace toporec
