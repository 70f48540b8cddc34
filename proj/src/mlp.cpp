#include "toporec/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "toporec/errors.hpp"
#include "toporec/rng.hpp"

namespace toporec {

std::vector<LrPhase> schedule_final_1e4() {
  return {{500, 1e-2}, {100, 1e-3}, {100, 1e-4}, {100, 1e-4}};
}

std::vector<LrPhase> schedule_final_1e6() {
  return {{500, 1e-2}, {100, 1e-3}, {100, 1e-4}, {100, 1e-6}};
}

double learning_rate_at(const std::vector<LrPhase>& schedule, int epoch) {
  int upto = 0;
  for (const auto& phase : schedule) {
    upto += phase.epochs;
    if (epoch <= upto) return phase.lr;
  }
  return schedule.empty() ? 0.0 : schedule.back().lr;
}

MlpModel init_model(ModelKind kind, int input_dim, int classes, std::uint64_t seed) {
  if (input_dim < 1) throw DimMismatch("init_model: input_dim must be >= 1");
  if (classes < 1) throw DimMismatch("init_model: classes must be >= 1");
  MlpModel model;
  model.kind = kind;
  model.init_seed = seed;
  if (kind == ModelKind::amplitude) {
    model.layer_dims = {input_dim, 64, classes};
  } else {
    model.layer_dims = {input_dim, 512, 256, 64, classes};
  }
  Rng rng(derive_seed(seed, 0x6d6c70));
  for (std::size_t l = 0; l + 1 < model.layer_dims.size(); ++l) {
    const int in = model.layer_dims[l];
    const int out = model.layer_dims[l + 1];
    Matrix w(in, out);
    const double bound = std::sqrt(3.0 / in);
    for (double& v : w.data) v = rng.uniform(-bound, bound);
    model.weights.push_back(std::move(w));
    model.biases.emplace_back(out, 0.0);
  }
  return model;
}

namespace {

void add_bias_relu(Matrix& z, const std::vector<double>& bias, bool relu) {
  for (int i = 0; i < z.rows; ++i) {
    double* row = z.row(i);
    for (int j = 0; j < z.cols; ++j) {
      row[j] += bias[j];
      if (relu && row[j] < 0.0) row[j] = 0.0;
    }
  }
}

void softmax_rows(Matrix& z) {
  for (int i = 0; i < z.rows; ++i) {
    double* row = z.row(i);
    double mx = row[0];
    for (int j = 1; j < z.cols; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (int j = 0; j < z.cols; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    const double inv = 1.0 / sum;
    for (int j = 0; j < z.cols; ++j) row[j] *= inv;
  }
}

// activations[0] = x, activations[l+1] = layer l output (post ReLU/softmax)
void forward_batch(const MlpModel& model, const Matrix& x, std::vector<Matrix>& activations,
                   bool parallel) {
  const int layers = model.trainable_layers();
  activations.assign(1, x);
  for (int l = 0; l < layers; ++l) {
    Matrix z(activations[l].rows, model.layer_dims[l + 1]);
    gemm_nn(activations[l], model.weights[l], z, parallel);
    const bool hidden = l + 1 < layers;
    add_bias_relu(z, model.biases[l], hidden);
    if (!hidden) softmax_rows(z);
    activations.push_back(std::move(z));
  }
}

double mean_cross_entropy(const Matrix& probs, const std::vector<int>& labels, int first,
                          int count) {
  double loss = 0.0;
  for (int i = 0; i < count; ++i) {
    const double p = std::max(probs(i, labels[first + i]), 1e-300);
    loss -= std::log(p);
  }
  return loss / count;
}

}  // namespace

std::vector<double> forward(const MlpModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.input_dim())
    throw DimMismatch("forward: feature length does not match model input");
  Matrix batch(1, model.input_dim());
  std::copy(x.begin(), x.end(), batch.data.begin());
  std::vector<Matrix> acts;
  forward_batch(model, batch, acts, false);
  return acts.back().data;
}

Prediction predict(const MlpModel& model, std::span<const double> x) {
  Prediction pred;
  pred.probabilities = forward(model, x);
  pred.class_index = 0;
  for (std::size_t j = 1; j < pred.probabilities.size(); ++j)
    if (pred.probabilities[j] > pred.probabilities[pred.class_index])
      pred.class_index = static_cast<int>(j);
  return pred;
}

namespace {

// backward pass for one batch; x rows are the batch samples
double batch_loss_and_gradients(const MlpModel& model, const Matrix& x,
                                const std::vector<int>& labels, int first, Gradients& grads,
                                bool parallel) {
  const int layers = model.trainable_layers();
  const int batch = x.rows;
  std::vector<Matrix> acts;
  forward_batch(model, x, acts, parallel);
  const double loss = mean_cross_entropy(acts.back(), labels, first, batch);

  Matrix delta = acts.back();  // softmax output
  for (int i = 0; i < batch; ++i) {
    delta(i, labels[first + i]) -= 1.0;
    double* row = delta.row(i);
    for (int j = 0; j < delta.cols; ++j) row[j] /= batch;
  }

  for (int l = layers - 1; l >= 0; --l) {
    gemm_tn(acts[l], delta, grads.weights[l], parallel);
    auto& db = grads.biases[l];
    std::fill(db.begin(), db.end(), 0.0);
    for (int i = 0; i < batch; ++i) {
      const double* row = delta.row(i);
      for (int j = 0; j < delta.cols; ++j) db[j] += row[j];
    }
    if (l == 0) break;
    Matrix prev(batch, model.layer_dims[l]);
    gemm_nt(delta, model.weights[l], prev, parallel);
    // ReLU mask from the post-activation values
    for (int i = 0; i < batch; ++i) {
      const double* a = acts[l].row(i);
      double* row = prev.row(i);
      for (int j = 0; j < prev.cols; ++j)
        if (a[j] <= 0.0) row[j] = 0.0;
    }
    delta = std::move(prev);
  }
  return loss;
}

Gradients make_gradients(const MlpModel& model) {
  Gradients g;
  for (int l = 0; l < model.trainable_layers(); ++l) {
    g.weights.emplace_back(model.weights[l].rows, model.weights[l].cols);
    g.biases.emplace_back(model.biases[l].size(), 0.0);
  }
  return g;
}

}  // namespace

double loss_and_gradients(const MlpModel& model, const Matrix& x, const std::vector<int>& labels,
                          Gradients& out, bool parallel) {
  if (x.cols != model.input_dim()) throw DimMismatch("loss_and_gradients: feature width");
  if (static_cast<std::size_t>(x.rows) != labels.size())
    throw LengthMismatch("loss_and_gradients: rows vs labels");
  if (out.weights.empty()) out = make_gradients(model);
  return batch_loss_and_gradients(model, x, labels, 0, out, parallel);
}

double batch_loss(const MlpModel& model, const Matrix& x, const std::vector<int>& labels,
                  bool parallel) {
  std::vector<Matrix> acts;
  forward_batch(model, x, acts, parallel);
  return mean_cross_entropy(acts.back(), labels, 0, x.rows);
}

TrainResult train(MlpModel& model, const Matrix& features, const std::vector<int>& labels,
                  const TrainConfig& cfg) {
  if (features.cols != model.input_dim()) throw DimMismatch("train: feature width");
  if (static_cast<std::size_t>(features.rows) != labels.size())
    throw LengthMismatch("train: rows vs labels");
  if (cfg.epochs < 1 || cfg.batch_size < 1) throw Error("train: bad epoch or batch size");
  const int n = features.rows;
  if (n == 0) throw Error("train: no samples");

  std::vector<char> covered(model.classes(), 0);
  for (int y : labels) {
    if (y < 0 || y >= model.classes()) throw Error("train: label out of range");
    covered[y] = 1;
  }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end())
    throw Error("train: a class has no training samples");

  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  Gradients grads = make_gradients(model);
  Gradients m = make_gradients(model);
  Gradients v = make_gradients(model);

  Rng shuffle_rng(derive_seed(cfg.seed, 0x7368));
  std::vector<int> index(n);
  std::iota(index.begin(), index.end(), 0);

  TrainResult result;
  result.epoch_loss.reserve(cfg.epochs);
  std::int64_t step = 0;
  std::vector<int> batch_labels(cfg.batch_size);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double lr = learning_rate_at(cfg.lr_schedule, epoch);
    shuffle_rng.shuffle(index);
    double epoch_loss = 0.0;

    for (int start = 0; start < n; start += cfg.batch_size) {
      const int count = std::min(cfg.batch_size, n - start);
      Matrix batch(count, features.cols);
      batch_labels.resize(count);
      for (int i = 0; i < count; ++i) {
        const int src = index[start + i];
        std::copy(features.row(src), features.row(src) + features.cols, batch.row(i));
        batch_labels[i] = labels[src];
      }

      const double loss = batch_loss_and_gradients(model, batch, batch_labels, 0, grads,
                                                   cfg.parallel);
      if (!std::isfinite(loss))
        throw NonFiniteLoss("epoch " + std::to_string(epoch) + ", batch at sample " +
                            std::to_string(start));
      epoch_loss += loss * count;

      ++step;
      const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (int l = 0; l < model.trainable_layers(); ++l) {
        auto& w = model.weights[l].data;
        const auto& g = grads.weights[l].data;
        auto& mw = m.weights[l].data;
        auto& vw = v.weights[l].data;
        for (std::size_t i = 0; i < w.size(); ++i) {
          mw[i] = beta1 * mw[i] + (1.0 - beta1) * g[i];
          vw[i] = beta2 * vw[i] + (1.0 - beta2) * g[i] * g[i];
          w[i] -= lr * (mw[i] / bc1) / (std::sqrt(vw[i] / bc2) + eps);
        }
        auto& b = model.biases[l];
        const auto& gb = grads.biases[l];
        auto& mb = m.biases[l];
        auto& vb = v.biases[l];
        for (std::size_t i = 0; i < b.size(); ++i) {
          mb[i] = beta1 * mb[i] + (1.0 - beta1) * gb[i];
          vb[i] = beta2 * vb[i] + (1.0 - beta2) * gb[i] * gb[i];
          b[i] -= lr * (mb[i] / bc1) / (std::sqrt(vb[i] / bc2) + eps);
        }
      }
    }
    result.epoch_loss.push_back(epoch_loss / n);
  }
  return result;
}

namespace {
constexpr char kModelMagic[8] = {'T', 'R', 'E', 'C', 'M', 'L', 'P', '1'};
constexpr std::uint32_t kInitFanInUniform = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}
std::uint32_t read_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
}  // namespace

void write_model(const std::filesystem::path& path, const MlpModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kModelMagic, 8);
  write_u32(out, 1);  // version
  write_u32(out, static_cast<std::uint32_t>(model.kind));
  write_u32(out, kInitFanInUniform);
  out.write(reinterpret_cast<const char*>(&model.init_seed), 8);
  write_u32(out, static_cast<std::uint32_t>(model.layer_dims.size()));
  for (int d : model.layer_dims) write_u32(out, static_cast<std::uint32_t>(d));
  for (int l = 0; l < model.trainable_layers(); ++l) {
    const auto& w = model.weights[l].data;
    out.write(reinterpret_cast<const char*>(w.data()), 8 * static_cast<std::streamsize>(w.size()));
    const auto& b = model.biases[l];
    out.write(reinterpret_cast<const char*>(b.data()), 8 * static_cast<std::streamsize>(b.size()));
  }
  write_u32(out, static_cast<std::uint32_t>(model.class_labels.size()));
  for (const auto& label : model.class_labels) {
    write_u32(out, static_cast<std::uint32_t>(label.size()));
    out.write(label.data(), static_cast<std::streamsize>(label.size()));
  }
  if (!out) throw Error("short write: " + path.string());
}

MlpModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kModelMagic, 8) != 0)
    throw Error("not a model file: " + path.string());
  if (read_u32(in) != 1) throw Error("unsupported model file version");
  MlpModel model;
  model.kind = static_cast<ModelKind>(read_u32(in));
  read_u32(in);  // init id
  in.read(reinterpret_cast<char*>(&model.init_seed), 8);
  const std::uint32_t layers = read_u32(in);
  model.layer_dims.resize(layers);
  for (auto& d : model.layer_dims) d = static_cast<int>(read_u32(in));
  for (std::uint32_t l = 0; l + 1 < layers; ++l) {
    Matrix w(model.layer_dims[l], model.layer_dims[l + 1]);
    in.read(reinterpret_cast<char*>(w.data.data()),
            8 * static_cast<std::streamsize>(w.data.size()));
    model.weights.push_back(std::move(w));
    std::vector<double> b(model.layer_dims[l + 1]);
    in.read(reinterpret_cast<char*>(b.data()), 8 * static_cast<std::streamsize>(b.size()));
    model.biases.push_back(std::move(b));
  }
  const std::uint32_t classes = read_u32(in);
  model.class_labels.resize(classes);
  for (auto& label : model.class_labels) {
    const std::uint32_t len = read_u32(in);
    label.resize(len);
    in.read(label.data(), len);
  }
  if (!in) throw Error("truncated model file: " + path.string());
  return model;
}

}  // namespace toporec
