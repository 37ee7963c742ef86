#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "lowrank/dense_matrix.hpp"

namespace lowrank {

/// Matrix-free view of an m-by-n operator for the partial SVD.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  /// y = A x
  virtual void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const = 0;
  /// y = A^T x
  virtual void apply_transpose(const Eigen::VectorXd& x, Eigen::VectorXd& y) const = 0;
  virtual Eigen::MatrixXd to_dense() const = 0;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(const Eigen::MatrixXd& m) : m_(m) {}
  Index rows() const override { return m_.rows(); }
  Index cols() const override { return m_.cols(); }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override { y.noalias() = m_ * x; }
  void apply_transpose(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override {
    y.noalias() = m_.transpose() * x;
  }
  Eigen::MatrixXd to_dense() const override { return m_; }

 private:
  const Eigen::MatrixXd& m_;
};

/// Top-k singular triplets, S descending.
struct TruncatedSVD {
  Eigen::MatrixXd U;  // m x k
  Eigen::VectorXd S;  // k
  Eigen::MatrixXd V;  // n x k
};

enum class SvdBackend {
  automatic,  // Lanczos when k <= partial_fraction * min(m, n), full SVD otherwise
  lanczos,
  full,
};

struct SvdOptions {
  SvdBackend backend = SvdBackend::automatic;
  double partial_fraction = 0.2;
  /// Ritz triplet accepted once its residual is below tol * sigma_max.
  double tol = 1e-13;
  /// Cap on Krylov dimension; 0 means min(m, n), at which point the
  /// factorization is exact and always accepted.
  Index max_steps = 0;
  std::uint64_t seed = 0x5eed5eedULL;
};

/// Top-k singular triplets of w. Throws InvalidArgument unless
/// 1 <= k <= min(rows, cols); NumericalFailure if the backend does not converge.
TruncatedSVD truncated_svd(const DenseMatrix& w, Index k, const SvdOptions& opts = {});
TruncatedSVD truncated_svd(const Eigen::MatrixXd& w, Index k, const SvdOptions& opts = {});
TruncatedSVD truncated_svd(const LinearOperator& op, Index k, const SvdOptions& opts = {});

/// All singular values, descending (dense full SVD).
Eigen::VectorXd singular_values(const Eigen::MatrixXd& w);

/// Largest singular value; Lanczos for large operators.
double spectral_norm(const Eigen::MatrixXd& w);
double spectral_norm(const LinearOperator& op);

}  // namespace lowrank
