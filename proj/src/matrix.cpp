// SPDX-License-Identifier: Apache-2.0
#include "uniform/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace uniform {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error("DenseMatrix: data length " + std::to_string(data_.size()) + " does not match " +
                std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw Error("DenseMatrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(data));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void DenseMatrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool DenseMatrix::all_finite() const noexcept { return uniform::all_finite(data_); }

void DenseMatrix::require_finite(const std::string& what) const {
  if (!all_finite()) throw Error(what + ": contains non-finite values");
}

void matvec(const DenseMatrix& w, std::span<const double> x, std::span<double> out) {
  if (x.size() != w.cols() || out.size() != w.rows()) throw Error("matvec: shape mismatch");
  for (std::size_t r = 0; r < w.rows(); ++r) out[r] = dot(w.row(r), x);
}

void matvec_transposed_add(const DenseMatrix& w, std::span<const double> g, std::span<double> out) {
  if (g.size() != w.rows() || out.size() != w.cols()) throw Error("matvec_transposed_add: shape mismatch");
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    auto row = w.row(r);
    for (std::size_t c = 0; c < w.cols(); ++c) out[c] += row[c] * gr;
  }
}

void outer_add(DenseMatrix& w, std::span<const double> a, std::span<const double> b) {
  if (a.size() != w.rows() || b.size() != w.cols()) throw Error("outer_add: shape mismatch");
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double ar = a[r];
    if (ar == 0.0) continue;
    auto row = w.row(r);
    for (std::size_t c = 0; c < w.cols(); ++c) row[c] += ar * b[c];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

bool all_finite(std::span<const double> v) noexcept {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace uniform
