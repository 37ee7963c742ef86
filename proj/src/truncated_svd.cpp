#include "lowrank/truncated_svd.hpp"

#include <algorithm>
#include <string>

#include "lowrank/errors.hpp"
#include "lowrank/random.hpp"

namespace lowrank {

namespace {

class TransposedOperator final : public LinearOperator {
 public:
  explicit TransposedOperator(const LinearOperator& inner) : inner_(inner) {}
  Index rows() const override { return inner_.cols(); }
  Index cols() const override { return inner_.rows(); }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override { inner_.apply_transpose(x, y); }
  void apply_transpose(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override { inner_.apply(x, y); }
  Eigen::MatrixXd to_dense() const override { return inner_.to_dense().transpose(); }

 private:
  const LinearOperator& inner_;
};

void check_rank(Index rows, Index cols, Index k) {
  const Index d = std::min(rows, cols);
  if (k < 1 || k > d)
    throw InvalidArgument("truncated_svd: k = " + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
}

TruncatedSVD full_svd(const Eigen::MatrixXd& w, Index k) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalFailure("dense SVD did not converge", 0);
  return {svd.matrixU().leftCols(k), svd.singularValues().head(k), svd.matrixV().leftCols(k)};
}

// Two passes of classical Gram-Schmidt against the first `count` columns.
void reorthogonalize(const Eigen::MatrixXd& basis, Index count, Eigen::VectorXd& x) {
  if (count == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd coeffs = basis.leftCols(count).transpose() * x;
    x.noalias() -= basis.leftCols(count) * coeffs;
  }
}

// Fresh random unit vector orthogonal to the first `count` columns of basis.
Eigen::VectorXd random_orthogonal(CounterRng& rng, const Eigen::MatrixXd& basis, Index count) {
  Eigen::VectorXd x(basis.rows());
  for (int attempt = 0; attempt < 8; ++attempt) {
    for (Index i = 0; i < x.size(); ++i) x(i) = rng.next_uniform(-1.0, 1.0);
    reorthogonalize(basis, count, x);
    const double norm = x.norm();
    if (norm > 1e-8) return x / norm;
  }
  throw NumericalFailure("could not extend Lanczos basis", static_cast<int>(count));
}

void ensure_capacity(Eigen::MatrixXd& basis, Index needed, Index limit) {
  if (basis.cols() >= needed) return;
  const Index grown = std::min(limit, std::max(needed, 2 * basis.cols()));
  basis.conservativeResize(Eigen::NoChange, grown);
}

// Golub-Kahan-Lanczos bidiagonalization with full reorthogonalization.
// Requires cols <= rows so the Krylov space in R^cols is exhausted after
// min(m, n) steps, where the factorization is exact.
TruncatedSVD lanczos_svd(const LinearOperator& op, Index k, const SvdOptions& opts) {
  const Index m = op.rows();
  const Index n = op.cols();
  const Index d = n;
  const Index limit = opts.max_steps > 0 ? std::min(opts.max_steps, d) : d;
  CounterRng rng(opts.seed, 0);

  Eigen::MatrixXd U(m, std::min(d, std::max<Index>(2 * k + 16, 32)));
  Eigen::MatrixXd V(n, std::min(d + 1, U.cols() + 1));
  std::vector<double> alpha;
  std::vector<double> beta;

  for (Index i = 0; i < n; ++i) V(i, 0) = rng.next_uniform(-1.0, 1.0);
  V.col(0).normalize();

  Index next_check = std::min(d, std::max(k + 10, 2 * k));
  Eigen::VectorXd u(m);
  Eigen::VectorXd v(n);
  double scale = 0.0;  // running estimate of ||A|| for breakdown detection

  for (Index j = 0; j < limit; ++j) {
    ensure_capacity(U, j + 1, d);
    ensure_capacity(V, j + 2, d + 1);

    op.apply(V.col(j), u);
    if (j > 0) u -= beta[static_cast<std::size_t>(j - 1)] * U.col(j - 1);
    reorthogonalize(U, j, u);
    double a = u.norm();
    scale = std::max(scale, a);
    if (a <= 1e-14 * scale || a == 0.0) {
      a = 0.0;
      u = random_orthogonal(rng, U, j);
    } else {
      u /= a;
    }
    U.col(j) = u;
    alpha.push_back(a);

    op.apply_transpose(U.col(j), v);
    v -= a * V.col(j);
    reorthogonalize(V, j + 1, v);
    double b = v.norm();
    scale = std::max(scale, b);
    const Index p = j + 1;
    if (b <= 1e-14 * scale || b == 0.0) {
      b = 0.0;
      if (p < d) v = random_orthogonal(rng, V, p);
    } else {
      v /= b;
    }
    if (p < d) V.col(p) = v;
    beta.push_back(b);

    if (p < k) continue;
    if (p != limit && p < next_check && b != 0.0) continue;

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, p);
    for (Index i = 0; i < p; ++i) {
      B(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < p) B(i, i + 1) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::BDCSVD<Eigen::MatrixXd> small(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (small.info() != Eigen::Success) throw NumericalFailure("bidiagonal SVD did not converge", static_cast<int>(p));
    const Eigen::VectorXd& sigma = small.singularValues();

    bool converged = p == d;
    if (!converged) {
      const double threshold = opts.tol * std::max(sigma(0), scale);
      converged = true;
      for (Index i = 0; i < k; ++i) {
        if (b * std::abs(small.matrixU()(p - 1, i)) > threshold) {
          converged = false;
          break;
        }
      }
    }
    if (converged) {
      return {U.leftCols(p) * small.matrixU().leftCols(k), sigma.head(k),
              V.leftCols(p) * small.matrixV().leftCols(k)};
    }
    if (p == limit) throw NumericalFailure("Lanczos bidiagonalization did not converge", static_cast<int>(p));
    next_check = std::min(d, p + std::max<Index>(5, p / 4));
  }
  throw NumericalFailure("Lanczos bidiagonalization did not converge", static_cast<int>(limit));
}

bool use_lanczos(Index rows, Index cols, Index k, const SvdOptions& opts) {
  switch (opts.backend) {
    case SvdBackend::lanczos: return true;
    case SvdBackend::full: return false;
    case SvdBackend::automatic:
      break;
  }
  const double d = static_cast<double>(std::min(rows, cols));
  return static_cast<double>(k) <= opts.partial_fraction * d;
}

}  // namespace

TruncatedSVD truncated_svd(const DenseMatrix& w, Index k, const SvdOptions& opts) {
  return truncated_svd(w.eigen(), k, opts);
}

TruncatedSVD truncated_svd(const Eigen::MatrixXd& w, Index k, const SvdOptions& opts) {
  check_rank(w.rows(), w.cols(), k);
  if (!use_lanczos(w.rows(), w.cols(), k, opts)) return full_svd(w, k);
  return truncated_svd(DenseOperator(w), k, opts);
}

TruncatedSVD truncated_svd(const LinearOperator& op, Index k, const SvdOptions& opts) {
  check_rank(op.rows(), op.cols(), k);
  if (!use_lanczos(op.rows(), op.cols(), k, opts)) return full_svd(op.to_dense(), k);
  if (op.cols() <= op.rows()) return lanczos_svd(op, k, opts);
  TruncatedSVD t = lanczos_svd(TransposedOperator(op), k, opts);
  std::swap(t.U, t.V);
  return t;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& w) {
  if (w.size() == 0) return {};
  Eigen::BDCSVD<Eigen::MatrixXd> svd(w);
  if (svd.info() != Eigen::Success) throw NumericalFailure("dense SVD did not converge", 0);
  return svd.singularValues();
}

double spectral_norm(const Eigen::MatrixXd& w) {
  if (w.size() == 0) return 0.0;
  return truncated_svd(w, 1).S(0);
}

double spectral_norm(const LinearOperator& op) { return truncated_svd(op, 1).S(0); }

}  // namespace lowrank
