#include "toporec/linalg.hpp"

#include <cassert>

#include "toporec/errors.hpp"

namespace toporec {

Matrix transposed(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

namespace {

void check_nn(const Matrix& a, const Matrix& b, const Matrix& c) {
  if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols)
    throw ShapeMismatch("gemm_nn operand shapes");
}

// row i of C accumulated over k in index order; vectorizes over j
inline void nn_row(const Matrix& a, const Matrix& b, Matrix& c, int i) {
  double* ci = c.row(i);
  for (int j = 0; j < c.cols; ++j) ci[j] = 0.0;
  for (int k = 0; k < a.cols; ++k) {
    const double aik = a(i, k);
    const double* bk = b.row(k);
    for (int j = 0; j < c.cols; ++j) ci[j] += aik * bk[j];
  }
}

inline void tn_row(const Matrix& a, const Matrix& b, Matrix& c, int p) {
  double* cp = c.row(p);
  for (int q = 0; q < c.cols; ++q) cp[q] = 0.0;
  for (int i = 0; i < a.rows; ++i) {
    const double aip = a(i, p);
    const double* bi = b.row(i);
    for (int q = 0; q < c.cols; ++q) cp[q] += aip * bi[q];
  }
}

inline void nt_row(const Matrix& a, const Matrix& b, Matrix& c, int i) {
  const double* ai = a.row(i);
  double* ci = c.row(i);
  for (int j = 0; j < c.cols; ++j) {
    const double* bj = b.row(j);
    double acc = 0.0;
    for (int k = 0; k < a.cols; ++k) acc += ai[k] * bj[k];
    ci[j] = acc;
  }
}

}  // namespace

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c, bool parallel) {
  check_nn(a, b, c);
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < c.rows; ++i) nn_row(a, b, c, i);
}

void gemm_nn_serial(const Matrix& a, const Matrix& b, Matrix& c) {
  check_nn(a, b, c);
  for (int i = 0; i < c.rows; ++i) nn_row(a, b, c, i);
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c, bool parallel) {
  if (a.rows != b.rows || c.rows != a.cols || c.cols != b.cols)
    throw ShapeMismatch("gemm_tn operand shapes");
#pragma omp parallel for schedule(static) if (parallel)
  for (int p = 0; p < c.rows; ++p) tn_row(a, b, c, p);
}

void gemm_tn_serial(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.rows != b.rows || c.rows != a.cols || c.cols != b.cols)
    throw ShapeMismatch("gemm_tn operand shapes");
  for (int p = 0; p < c.rows; ++p) tn_row(a, b, c, p);
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c, bool parallel) {
  if (a.cols != b.cols || c.rows != a.rows || c.cols != b.rows)
    throw ShapeMismatch("gemm_nt operand shapes");
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < c.rows; ++i) nt_row(a, b, c, i);
}

void gemm_nt_serial(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols != b.cols || c.rows != a.rows || c.cols != b.rows)
    throw ShapeMismatch("gemm_nt operand shapes");
  for (int i = 0; i < c.rows; ++i) nt_row(a, b, c, i);
}

}  // namespace toporec
