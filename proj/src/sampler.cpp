#include "toporec/sampler.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "toporec/errors.hpp"

namespace toporec {

int SparseSampler::feature_length() const {
  int n = 0;
  for (const auto& p : pivot_indices) n += static_cast<int>(p.size());
  return n;
}

double optimal_hard_threshold_omega(double beta) {
  return 0.56 * beta * beta * beta - 0.95 * beta * beta + 1.82 * beta + 1.43;
}

namespace {

using EigenMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenMatrix> map_of(const Matrix& m) {
  return Eigen::Map<const EigenMatrix>(m.data.data(), m.rows, m.cols);
}

}  // namespace

SvdSpectrum svd_spectrum(const Matrix& x, int max_rank) {
  const int m = x.rows, n = x.cols;
  const int small = std::min(m, n);
  max_rank = std::min(max_rank, small);

  SvdSpectrum out;
  out.singular_values.resize(small);

  // Gram matrix of the smaller side keeps the eigenproblem cheap; eigenpairs
  // of X X^T (or X^T X) give the singular values and one set of vectors.
  if (m <= n) {
    Matrix gram(m, m);
    gemm_nt(x, x, gram, true);
    Eigen::SelfAdjointEigenSolver<EigenMatrix> eig(map_of(gram));
    // eigenvalues ascending -> reverse
    for (int i = 0; i < small; ++i) {
      const double lambda = std::max(eig.eigenvalues()(small - 1 - i), 0.0);
      out.singular_values[i] = std::sqrt(lambda);
    }
    out.left = Matrix(m, max_rank);
    for (int c = 0; c < max_rank; ++c)
      for (int r = 0; r < m; ++r) out.left(r, c) = eig.eigenvectors()(r, small - 1 - c);
  } else {
    Matrix xt = transposed(x);
    Matrix gram(n, n);
    gemm_nt(xt, xt, gram, true);
    Eigen::SelfAdjointEigenSolver<EigenMatrix> eig(map_of(gram));
    for (int i = 0; i < n; ++i) {
      const double lambda = std::max(eig.eigenvalues()(n - 1 - i), 0.0);
      out.singular_values[i] = std::sqrt(lambda);
    }
    // u_i = X v_i / sigma_i
    Matrix v(n, max_rank);
    for (int c = 0; c < max_rank; ++c)
      for (int r = 0; r < n; ++r) v(r, c) = eig.eigenvectors()(r, n - 1 - c);
    out.left = Matrix(m, max_rank);
    gemm_nn(x, v, out.left, true);
    for (int c = 0; c < max_rank; ++c) {
      const double s = out.singular_values[c];
      const double inv = s > 0.0 ? 1.0 / s : 0.0;
      for (int r = 0; r < m; ++r) out.left(r, c) *= inv;
    }
  }
  return out;
}

std::vector<std::uint32_t> pivoted_qr_pivots(const Matrix& a, int count) {
  const int rows = a.rows, cols = a.cols;
  count = std::min(count, std::min(rows, cols));
  Matrix r = a;
  std::vector<char> chosen(cols, 0);
  std::vector<std::uint32_t> pivots;
  pivots.reserve(count);

  std::vector<double> v(rows);
  for (int step = 0; step < count; ++step) {
    int best = -1;
    double best_norm = -1.0;
    for (int j = 0; j < cols; ++j) {
      if (chosen[j]) continue;
      double norm2 = 0.0;
      for (int i = step; i < rows; ++i) norm2 += r(i, j) * r(i, j);
      if (norm2 > best_norm) {
        best_norm = norm2;
        best = j;
      }
    }
    pivots.push_back(static_cast<std::uint32_t>(best));
    chosen[best] = 1;

    // Householder reflector zeroing the pivot column below the diagonal
    double norm = std::sqrt(best_norm);
    if (norm == 0.0) continue;
    const double x0 = r(step, best);
    const double alpha = x0 >= 0.0 ? -norm : norm;
    double vnorm2 = 0.0;
    for (int i = step; i < rows; ++i) {
      v[i] = r(i, best);
      if (i == step) v[i] -= alpha;
      vnorm2 += v[i] * v[i];
    }
    if (vnorm2 == 0.0) continue;
    for (int j = 0; j < cols; ++j) {
      if (chosen[j]) continue;
      double dot = 0.0;
      for (int i = step; i < rows; ++i) dot += v[i] * r(i, j);
      const double coef = 2.0 * dot / vnorm2;
      for (int i = step; i < rows; ++i) r(i, j) -= coef * v[i];
    }
    r(step, best) = alpha;
    for (int i = step + 1; i < rows; ++i) r(i, best) = 0.0;
  }
  return pivots;
}

std::vector<std::uint32_t> fit_direction(const Matrix& stack) {
  const int m = stack.rows, n = stack.cols;
  if (n < 2) throw ShapeMismatch("sampler fit needs at least 2 training columns");

  bool any_nonzero = false;
  for (double v : stack.data) any_nonzero = any_nonzero || v != 0.0;
  if (!any_nonzero) throw AllZeroStack("a direction's training persistence images are all zero");

  const int small = std::min(m, n);
  SvdSpectrum svd = svd_spectrum(stack, small);
  const auto& sigma = svd.singular_values;

  double median;
  if (small % 2 == 1) {
    median = sigma[small / 2];
  } else {
    median = 0.5 * (sigma[small / 2 - 1] + sigma[small / 2]);
  }
  const double beta = static_cast<double>(small) / std::max(m, n);
  const double tau = optimal_hard_threshold_omega(beta) * median;
  // numerical-rank floor keeps eigensolver noise out of the count
  const double floor = sigma[0] * std::max(m, n) * std::sqrt(std::numeric_limits<double>::epsilon());
  const double cut = std::max(tau, floor);

  int rank = 0;
  while (rank < small && sigma[rank] > cut) ++rank;
  rank = std::max(rank, 1);

  Matrix ut(rank, m);
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < m; ++j) ut(i, j) = svd.left(j, i);
  return pivoted_qr_pivots(ut, rank);
}

SparseSampler fit_sampler(const std::vector<Matrix>& pi_stacks, int grid_side) {
  if (pi_stacks.empty()) throw ShapeMismatch("fit_sampler: no direction stacks");
  const int m = grid_side * grid_side;
  const int n = pi_stacks.front().cols;
  SparseSampler sampler;
  sampler.grid_side = grid_side;
  for (const auto& stack : pi_stacks) {
    if (stack.rows != m || stack.cols != n)
      throw ShapeMismatch("fit_sampler: stack dimensions disagree");
    sampler.pivot_indices.push_back(fit_direction(stack));
  }
  return sampler;
}

std::vector<double> apply_sampler(const SparseSampler& sampler,
                                  const std::vector<PersistenceImage>& pis) {
  if (static_cast<int>(pis.size()) != sampler.directions())
    throw ShapeMismatch("apply_sampler: wrong number of persistence images");
  std::vector<double> out;
  out.reserve(sampler.feature_length());
  for (int k = 0; k < sampler.directions(); ++k) {
    const auto& pi = pis[k];
    if (pi.config.grid_side != sampler.grid_side)
      throw ShapeMismatch("apply_sampler: persistence image grid does not match sampler");
    for (std::uint32_t idx : sampler.pivot_indices[k]) out.push_back(pi.values[idx]);
  }
  return out;
}

namespace {
constexpr char kSamplerMagic[8] = {'T', 'R', 'E', 'C', 'S', 'M', 'P', '1'};
}

void write_sampler(const std::filesystem::path& path, const SparseSampler& sampler) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kSamplerMagic, 8);
  const std::uint32_t version = 1;
  const std::uint32_t d = static_cast<std::uint32_t>(sampler.directions());
  const std::uint32_t grid = static_cast<std::uint32_t>(sampler.grid_side);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  out.write(reinterpret_cast<const char*>(&grid), 4);
  for (const auto& pivots : sampler.pivot_indices) {
    const std::uint32_t l = static_cast<std::uint32_t>(pivots.size());
    out.write(reinterpret_cast<const char*>(&l), 4);
    out.write(reinterpret_cast<const char*>(pivots.data()), 4 * static_cast<std::streamsize>(l));
  }
  if (!out) throw Error("short write: " + path.string());
}

SparseSampler read_sampler(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kSamplerMagic, 8) != 0)
    throw Error("not a sampler file: " + path.string());
  std::uint32_t version = 0, d = 0, grid = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&d), 4);
  in.read(reinterpret_cast<char*>(&grid), 4);
  if (!in || version != 1) throw Error("unsupported sampler file version");
  SparseSampler sampler;
  sampler.grid_side = static_cast<int>(grid);
  sampler.pivot_indices.resize(d);
  for (auto& pivots : sampler.pivot_indices) {
    std::uint32_t l = 0;
    in.read(reinterpret_cast<char*>(&l), 4);
    pivots.resize(l);
    in.read(reinterpret_cast<char*>(pivots.data()), 4 * static_cast<std::streamsize>(l));
    if (!in) throw Error("truncated sampler file: " + path.string());
  }
  return sampler;
}

}  // namespace toporec
