#pragma once

#include <cstddef>
#include <vector>

namespace toporec {

// Dense row-major matrix of doubles. Small on purpose: the project needs
// batched products and Gram matrices, nothing more.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }
  const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

Matrix transposed(const Matrix& a);

// C = A * B. Each entry of C is accumulated by a single thread in a fixed
// order, so the result is bitwise identical for any thread count; the
// `parallel` flag only changes how rows of C are distributed.
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c, bool parallel);

// C = A^T * B (A is stored untransposed).
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c, bool parallel);

// C = A * B^T (B is stored untransposed).
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c, bool parallel);

// Serial references for the kernels above; the benchmark compares them and
// the tests assert bitwise equality with the parallel paths.
void gemm_nn_serial(const Matrix& a, const Matrix& b, Matrix& c);
void gemm_tn_serial(const Matrix& a, const Matrix& b, Matrix& c);
void gemm_nt_serial(const Matrix& a, const Matrix& b, Matrix& c);

}  // namespace toporec
