#include "lfc/sparse.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lfc {

CscMatrix CscMatrix::from_triplets(int rows, int cols, std::span<const Triplet> triplets) {
  CscMatrix m(rows, cols);
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("triplet index out of range");
  }

  // Counting sort by column, then order rows within each column.
  std::vector<int> count(cols, 0);
  for (const Triplet& t : triplets) ++count[t.col];
  for (int c = 0; c < cols; ++c) m.col_ptr_[c + 1] = m.col_ptr_[c] + count[c];

  std::vector<int> cursor(m.col_ptr_.begin(), m.col_ptr_.end() - 1);
  std::vector<int> rows_tmp(triplets.size());
  std::vector<double> vals_tmp(triplets.size());
  for (const Triplet& t : triplets) {
    const int p = cursor[t.col]++;
    rows_tmp[p] = t.row;
    vals_tmp[p] = t.value;
  }

  m.row_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::vector<int> order;
  std::vector<int> new_col_ptr(cols + 1, 0);
  for (int c = 0; c < cols; ++c) {
    const int begin = m.col_ptr_[c];
    const int end = m.col_ptr_[c + 1];
    order.resize(end - begin);
    std::iota(order.begin(), order.end(), begin);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return rows_tmp[a] < rows_tmp[b]; });
    // Merge duplicates while appending.
    for (int idx : order) {
      if (!m.row_idx_.empty() && static_cast<int>(m.row_idx_.size()) > new_col_ptr[c] &&
          m.row_idx_.back() == rows_tmp[idx]) {
        m.values_.back() += vals_tmp[idx];
      } else {
        m.row_idx_.push_back(rows_tmp[idx]);
        m.values_.push_back(vals_tmp[idx]);
      }
    }
    new_col_ptr[c + 1] = static_cast<int>(m.row_idx_.size());
  }
  m.col_ptr_ = std::move(new_col_ptr);
  return m;
}

void CscMatrix::multiply(std::span<const double> x, std::span<double> y, double alpha,
                         double beta) const {
  assert(static_cast<int>(x.size()) == cols_ && static_cast<int>(y.size()) == rows_);
  if (beta == 0.0) {
    std::fill(y.begin(), y.end(), 0.0);
  } else if (beta != 1.0) {
    for (double& v : y) v *= beta;
  }
  for (int c = 0; c < cols_; ++c) {
    const double xc = alpha * x[c];
    if (xc == 0.0) continue;
    for (int p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p) y[row_idx_[p]] += values_[p] * xc;
  }
}

void CscMatrix::multiply_transpose(std::span<const double> x, std::span<double> y, double alpha,
                                   double beta) const {
  assert(static_cast<int>(x.size()) == rows_ && static_cast<int>(y.size()) == cols_);
  for (int c = 0; c < cols_; ++c) {
    double acc = 0.0;
    for (int p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p) acc += values_[p] * x[row_idx_[p]];
    y[c] = alpha * acc + (beta == 0.0 ? 0.0 : beta * y[c]);
  }
}

void CscMatrix::col_abs_max(std::vector<double>& out) const {
  out.assign(cols_, 0.0);
  for (int c = 0; c < cols_; ++c) {
    for (int p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p)
      out[c] = std::max(out[c], std::abs(values_[p]));
  }
}

void CscMatrix::row_abs_max(std::vector<double>& out) const {
  out.assign(rows_, 0.0);
  for (int c = 0; c < cols_; ++c) {
    for (int p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p) {
      const int r = row_idx_[p];
      out[r] = std::max(out[r], std::abs(values_[p]));
    }
  }
}

std::vector<double> CscMatrix::col_abs_max() const {
  std::vector<double> out;
  col_abs_max(out);
  return out;
}

std::vector<double> CscMatrix::row_abs_max() const {
  std::vector<double> out;
  row_abs_max(out);
  return out;
}

CscMatrix CscMatrix::scaled(std::span<const double> row_scale,
                            std::span<const double> col_scale) const {
  assert(static_cast<int>(row_scale.size()) == rows_ &&
         static_cast<int>(col_scale.size()) == cols_);
  CscMatrix out = *this;
  for (int c = 0; c < cols_; ++c) {
    for (int p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p)
      out.values_[p] = values_[p] * row_scale[row_idx_[p]] * col_scale[c];
  }
  return out;
}

void CscMatrix::scale_rows_cols(std::span<const double> row_scale,
                                std::span<const double> col_scale) {
  assert(static_cast<int>(row_scale.size()) == rows_ &&
         static_cast<int>(col_scale.size()) == cols_);
  for (int c = 0; c < cols_; ++c) {
    for (int p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p)
      values_[p] *= row_scale[row_idx_[p]] * col_scale[c];
  }
}

void CscMatrix::scale_symmetric(std::span<const double> s) { scale_rows_cols(s, s); }

}  // namespace lfc
