#include "lowrank/dense_matrix.hpp"

#include <algorithm>
#include <string>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

void require_shape(Index rows, Index cols) {
  if (rows <= 0 || cols <= 0)
    throw InvalidArgument("matrix dimensions must be positive, got " + std::to_string(rows) + "x" +
                          std::to_string(cols));
}

}  // namespace

DenseMatrix::DenseMatrix(Index rows, Index cols) {
  require_shape(rows, cols);
  values_ = Eigen::MatrixXd::Zero(rows, cols);
}

DenseMatrix::DenseMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  require_shape(values_.rows(), values_.cols());
  if (!values_.allFinite()) throw InvalidArgument("matrix entries must be finite");
}

DenseMatrix DenseMatrix::identity(Index n) {
  require_shape(n, n);
  return DenseMatrix(Eigen::MatrixXd::Identity(n, n));
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  const auto n = static_cast<Index>(diag.size());
  require_shape(n, n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
  return DenseMatrix(std::move(m));
}

DenseMatrix DenseMatrix::from_row_major(Index rows, Index cols, std::span<const double> entries) {
  require_shape(rows, cols);
  if (static_cast<Index>(entries.size()) != rows * cols)
    throw InvalidArgument("expected " + std::to_string(rows * cols) + " entries, got " +
                          std::to_string(entries.size()));
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = entries[static_cast<std::size_t>(i * cols + j)];
  return DenseMatrix(std::move(m));
}

std::vector<double> DenseMatrix::row_major() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(values_.size()));
  for (Index i = 0; i < rows(); ++i)
    for (Index j = 0; j < cols(); ++j) out.push_back(values_(i, j));
  return out;
}

ObservedSet::ObservedSet(Index rows, Index cols, std::vector<Entry> indices)
    : rows_(rows), cols_(cols), indices_(std::move(indices)) {
  require_shape(rows, cols);
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    const auto& e = indices_[k];
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw InvalidArgument("observed index (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                            ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    if (k > 0 && !(indices_[k - 1] < e))
      throw InvalidArgument("observed indices must be strictly increasing without duplicates");
  }
  row_offsets_.assign(static_cast<std::size_t>(rows) + 1, 0);
  for (const auto& e : indices_) ++row_offsets_[static_cast<std::size_t>(e.row) + 1];
  for (std::size_t i = 1; i < row_offsets_.size(); ++i) row_offsets_[i] += row_offsets_[i - 1];
}

ObservedSet ObservedSet::from_unsorted(Index rows, Index cols, std::vector<Entry> indices) {
  std::sort(indices.begin(), indices.end());
  return ObservedSet(rows, cols, std::move(indices));
}

ObservedSet ObservedSet::all(Index rows, Index cols) {
  require_shape(rows, cols);
  std::vector<Entry> idx;
  idx.reserve(static_cast<std::size_t>(rows * cols));
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) idx.push_back({i, j});
  return ObservedSet(rows, cols, std::move(idx));
}

bool ObservedSet::contains(Index i, Index j) const {
  return std::binary_search(indices_.begin(), indices_.end(), Entry{i, j});
}

}  // namespace lowrank
