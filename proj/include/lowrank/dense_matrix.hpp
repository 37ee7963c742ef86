#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lowrank {

using Index = Eigen::Index;

/// Real m-by-n matrix in double precision.
///
/// A DenseMatrix is an immutable value: every operation in the library
/// returns a fresh matrix. All entries are finite; construction from data
/// containing NaN or Inf throws InvalidArgument. Storage is Eigen's
/// column-major layout; row-major order is only a serialization concern.
class DenseMatrix {
 public:
  /// Empty 0x0 placeholder. Not a valid operand for any operation.
  DenseMatrix() = default;

  /// rows x cols zero matrix.
  DenseMatrix(Index rows, Index cols);

  explicit DenseMatrix(Eigen::MatrixXd values);

  static DenseMatrix zeros(Index rows, Index cols) { return DenseMatrix(rows, cols); }
  static DenseMatrix identity(Index n);
  static DenseMatrix diagonal(std::span<const double> diag);
  static DenseMatrix from_row_major(Index rows, Index cols, std::span<const double> entries);

  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  bool empty() const noexcept { return values_.size() == 0; }

  double operator()(Index i, Index j) const { return values_(i, j); }

  const Eigen::MatrixXd& eigen() const noexcept { return values_; }

  std::vector<double> row_major() const;

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a.values_ == b.values_;
  }

 private:
  Eigen::MatrixXd values_;
};

/// A sampled index set (Omega) over an m-by-n grid.
///
/// Indices are 0-based, strictly increasing in (row, col) lexicographic
/// order. The complement is implicit.
class ObservedSet {
 public:
  struct Entry {
    Index row;
    Index col;
    friend auto operator<=>(const Entry&, const Entry&) = default;
  };

  ObservedSet() = default;
  ObservedSet(Index rows, Index cols, std::vector<Entry> indices);

  /// Sorts and validates; duplicates are rejected rather than merged.
  static ObservedSet from_unsorted(Index rows, Index cols, std::vector<Entry> indices);
  static ObservedSet all(Index rows, Index cols);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  const std::vector<Entry>& indices() const noexcept { return indices_; }
  const Entry& operator[](std::size_t k) const { return indices_[k]; }

  /// CSR-style offsets: entries of row i occupy [row_begin(i), row_begin(i+1)).
  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }

  bool contains(Index i, Index j) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Entry> indices_;
  std::vector<std::size_t> row_offsets_;
};

}  // namespace lowrank
