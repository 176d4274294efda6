#pragma once
// Minimal sparse support for the solver: triplet assembly into
// compressed-column storage, matrix-vector products, and column access.

#include <cstdint>
#include <span>
#include <vector>

namespace lfc {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed-column matrix. Rows within a column are sorted; duplicate
/// triplets are summed during assembly.
class CscMatrix {
 public:
  CscMatrix() = default;
  CscMatrix(int rows, int cols) : rows_(rows), cols_(cols), col_ptr_(cols + 1, 0) {}

  static CscMatrix from_triplets(int rows, int cols, std::span<const Triplet> triplets);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }

  const std::vector<int>& col_ptr() const { return col_ptr_; }
  const std::vector<int>& row_idx() const { return row_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// y = alpha*A*x + beta*y
  void multiply(std::span<const double> x, std::span<double> y, double alpha = 1.0,
                double beta = 0.0) const;
  /// y = alpha*A'*x + beta*y
  void multiply_transpose(std::span<const double> x, std::span<double> y, double alpha = 1.0,
                          double beta = 0.0) const;

  /// Max |value| per column / per row (for equilibration).
  std::vector<double> col_abs_max() const;
  std::vector<double> row_abs_max() const;
  void col_abs_max(std::vector<double>& out) const;
  void row_abs_max(std::vector<double>& out) const;

  /// B = A with value(i,j) scaled by row_scale[i] * col_scale[j].
  CscMatrix scaled(std::span<const double> row_scale, std::span<const double> col_scale) const;

  /// In-place value(i,j) *= row_scale[i] * col_scale[j].
  void scale_rows_cols(std::span<const double> row_scale, std::span<const double> col_scale);
  /// In-place value(i,j) *= s[i] * s[j], for symmetric matrices.
  void scale_symmetric(std::span<const double> s);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> col_ptr_;
  std::vector<int> row_idx_;
  std::vector<double> values_;
};

}  // namespace lfc
