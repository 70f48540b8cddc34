#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <filesystem>
#include <set>

#include "toporec/errors.hpp"
#include "toporec/rng.hpp"
#include "toporec/sampler.hpp"

using namespace toporec;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (auto& v : m.data) v = rng.uniform(-1.0, 1.0);
  return m;
}

// exact low-rank product of random factors
Matrix rank_r_matrix(int rows, int cols, int r, Rng& rng) {
  Matrix u = random_matrix(rows, r, rng);
  Matrix v = random_matrix(r, cols, rng);
  Matrix x(rows, cols);
  gemm_nn_serial(u, v, x);
  return x;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

}  // namespace

TEST_CASE("omega approximation hits the spec values") {
  CHECK(optimal_hard_threshold_omega(1.0) == doctest::Approx(2.86).epsilon(1e-12));
  CHECK(optimal_hard_threshold_omega(0.0) == doctest::Approx(1.43).epsilon(1e-12));
}

TEST_CASE("svd_spectrum agrees with a direct SVD") {
  Rng rng(11);
  for (const auto& [rows, cols] : {std::pair{30, 18}, std::pair{18, 30}, std::pair{25, 25}}) {
    const Matrix x = random_matrix(rows, cols, rng);
    const auto spec = svd_spectrum(x, 5);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(x),
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    REQUIRE(static_cast<int>(spec.singular_values.size()) == std::min(rows, cols));
    for (int i = 0; i < std::min(rows, cols); ++i)
      CHECK(spec.singular_values[i] ==
            doctest::Approx(svd.singularValues()(i)).epsilon(1e-9));
    // left vectors agree up to sign
    for (int c = 0; c < 5; ++c) {
      double dot = 0.0;
      for (int r = 0; r < rows; ++r) dot += spec.left(r, c) * svd.matrixU()(r, c);
      CHECK(std::fabs(dot) == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("pivoted QR follows residual norms with lowest-index ties") {
  Matrix a(2, 3);
  // rows [[0,1,0],[1,0,0]]: two unit columns and a zero column
  a(0, 1) = 1.0;
  a(1, 0) = 1.0;
  const auto pivots = pivoted_qr_pivots(a, 2);
  REQUIRE(pivots.size() == 2);
  CHECK(pivots[0] == 0);  // tie between columns 0 and 1 -> lowest index
  CHECK(pivots[1] == 1);  // zero column is never preferred
}

TEST_CASE("pivoted QR matches Eigen's column pivoting on random input") {
  Rng rng(12);
  for (int trial = 0; trial < 8; ++trial) {
    const int rows = 4 + static_cast<int>(rng.below(4));
    const int cols = rows + static_cast<int>(rng.below(10));
    const Matrix a = random_matrix(rows, cols, rng);
    const auto pivots = pivoted_qr_pivots(a, rows);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(to_eigen(a));
    const auto perm = qr.colsPermutation().indices();
    for (int i = 0; i < rows; ++i) CHECK(static_cast<int>(pivots[i]) == perm(i));
  }
}

TEST_CASE("identical nonzero columns collapse to a single pivot") {
  Rng rng(13);
  Matrix x(9, 6);  // grid_side 3
  std::vector<double> col(9);
  for (auto& v : col) v = rng.uniform(0.0, 1.0);
  for (int j = 0; j < x.cols; ++j)
    for (int i = 0; i < x.rows; ++i) x(i, j) = col[i];
  const auto sampler = fit_sampler({x}, 3);
  REQUIRE(sampler.rank(0) == 1);
  int expected = 0;
  for (int i = 1; i < 9; ++i)
    if (std::fabs(col[i]) > std::fabs(col[expected])) expected = i;
  CHECK(sampler.pivot_indices[0][0] == static_cast<std::uint32_t>(expected));
}

TEST_CASE("2x2 identity stack clamps the rank to one") {
  Matrix x(2, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 1.0;
  // singular values {1,1}: tau = omega(1) * 1 > 1 rejects both, clamp kicks in
  const auto pivots = fit_direction(x);
  CHECK(pivots.size() == 1);
}

TEST_CASE("noise-free rank-r stacks recover exactly rank r") {
  Rng rng(14);
  for (int r : {1, 2, 5}) {
    const Matrix x = rank_r_matrix(64, 40, r, rng);
    const auto pivots = fit_direction(x);
    CHECK(static_cast<int>(pivots.size()) == r);
    // pivots are distinct
    std::set<std::uint32_t> unique(pivots.begin(), pivots.end());
    CHECK(unique.size() == pivots.size());
  }
}

TEST_CASE("rank never exceeds the number of nonzero singular values") {
  Rng rng(15);
  const Matrix x = rank_r_matrix(49, 12, 3, rng);
  const auto spec = svd_spectrum(x, 12);
  const auto pivots = fit_direction(x);
  int nonzero = 0;
  for (double s : spec.singular_values)
    if (s > spec.singular_values[0] * 1e-12) ++nonzero;
  CHECK(static_cast<int>(pivots.size()) <= nonzero);
}

TEST_CASE("reconstruction identity against computed singular values") {
  Rng rng(16);
  const int rows = 21, cols = 17;
  const Matrix x = random_matrix(rows, cols, rng);
  const auto spec = svd_spectrum(x, std::min(rows, cols));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(x),
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  for (int l : {1, 4, 9}) {
    Eigen::MatrixXd approx = svd.matrixU().leftCols(l) *
                             svd.singularValues().head(l).asDiagonal() *
                             svd.matrixV().leftCols(l).transpose();
    const double frob = (to_eigen(x) - approx).squaredNorm();
    double tail = 0.0;
    for (int i = l; i < std::min(rows, cols); ++i)
      tail += spec.singular_values[i] * spec.singular_values[i];
    CHECK(frob == doctest::Approx(tail).epsilon(1e-8));
  }
}

TEST_CASE("fit is deterministic and rejects degenerate stacks") {
  Rng rng(17);
  const Matrix x = rank_r_matrix(25, 10, 4, rng);
  const auto a = fit_direction(x);
  const auto b = fit_direction(x);
  CHECK(a == b);

  Matrix zeros(25, 10);
  CHECK_THROWS_AS(fit_direction(zeros), AllZeroStack);
  Matrix one_col(25, 1);
  one_col(0, 0) = 1.0;
  CHECK_THROWS_AS(fit_direction(one_col), ShapeMismatch);
  CHECK_THROWS_AS(fit_sampler({x, Matrix(25, 9)}, 5), ShapeMismatch);
}

TEST_CASE("apply_sampler gathers pivot pixels in direction order") {
  SparseSampler sampler;
  sampler.grid_side = 2;
  sampler.pivot_indices = {{0}, {3}};
  PersistenceImageConfig cfg;
  cfg.grid_side = 2;
  cfg.birth_hi = 1.0;
  cfg.pers_hi = 1.0;
  PersistenceImage a, b;
  a.config = cfg;
  b.config = cfg;
  a.values = {10, 11, 12, 13};
  b.values = {20, 21, 22, 23};
  const auto features = apply_sampler(sampler, {a, b});
  CHECK(features == std::vector<double>{10, 23});

  CHECK_THROWS_AS(apply_sampler(sampler, {a}), ShapeMismatch);
}

TEST_CASE("row-selection consistency on a synthetic stack") {
  Rng rng(18);
  const int grid = 4, n = 12;
  Matrix x = rank_r_matrix(grid * grid, n, 3, rng);
  const auto sampler = fit_sampler({x}, grid);
  PersistenceImageConfig cfg;
  cfg.grid_side = grid;
  cfg.birth_hi = 1.0;
  cfg.pers_hi = 1.0;
  for (int j = 0; j < n; ++j) {
    PersistenceImage pi;
    pi.config = cfg;
    pi.values.resize(grid * grid);
    for (int r = 0; r < grid * grid; ++r) pi.values[r] = x(r, j);
    const auto features = apply_sampler(sampler, {pi});
    REQUIRE(features.size() == sampler.pivot_indices[0].size());
    for (std::size_t i = 0; i < features.size(); ++i)
      CHECK(features[i] == x(static_cast<int>(sampler.pivot_indices[0][i]), j));
  }
}

TEST_CASE("sampler file round trip") {
  SparseSampler sampler;
  sampler.grid_side = 50;
  sampler.pivot_indices = {{0, 17, 2499}, {42}, {7, 8}};
  const auto path = std::filesystem::temp_directory_path() / "toporec_sampler.bin";
  write_sampler(path, sampler);
  const auto back = read_sampler(path);
  CHECK(back.grid_side == sampler.grid_side);
  CHECK(back.pivot_indices == sampler.pivot_indices);
  CHECK(back.feature_length() == 6);
}
