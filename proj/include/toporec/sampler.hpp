#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "toporec/linalg.hpp"
#include "toporec/vectorize.hpp"

namespace toporec {

// Per-direction pixel sample sets learned from training persistence images:
// rank from the optimal hard singular-value threshold, locations from
// column-pivoted QR of the dominant left singular vectors.
struct SparseSampler {
  int grid_side = 0;
  std::vector<std::vector<std::uint32_t>> pivot_indices;  // one list per direction

  int directions() const { return static_cast<int>(pivot_indices.size()); }
  int rank(int k) const { return static_cast<int>(pivot_indices[k].size()); }
  int feature_length() const;
};

// omega(beta) ~ 0.56 b^3 - 0.95 b^2 + 1.82 b + 1.43, the median-based
// coefficient of the optimal hard threshold for unknown noise.
double optimal_hard_threshold_omega(double beta);

// All singular values of X (descending) plus the first max_rank left
// singular vectors, via the Gram matrix of the smaller side. `left` is
// m x max_rank, column i the i-th left singular vector.
struct SvdSpectrum {
  std::vector<double> singular_values;
  Matrix left;
};
SvdSpectrum svd_spectrum(const Matrix& x, int max_rank);

// Pivot order of classical column-pivoted Householder QR on `a`: at every
// step the column with the largest residual norm is chosen, ties broken by
// the lowest column index. Returns the first `count` pivots.
std::vector<std::uint32_t> pivoted_qr_pivots(const Matrix& a, int count);

// Rank selection + pivots for one direction's stack (m x N, one vectorized
// training PI per column). Exposed for per-direction streaming; validation
// matches fit_sampler.
std::vector<std::uint32_t> fit_direction(const Matrix& stack);

// Fits all directions. Each stack must be grid_side^2 x N with the same N >= 2.
SparseSampler fit_sampler(const std::vector<Matrix>& pi_stacks, int grid_side);

// Concatenates the sampled PI pixels direction by direction.
std::vector<double> apply_sampler(const SparseSampler& sampler,
                                  const std::vector<PersistenceImage>& pis);

void write_sampler(const std::filesystem::path& path, const SparseSampler& sampler);
SparseSampler read_sampler(const std::filesystem::path& path);

}  // namespace toporec
