#pragma once

#include <Eigen/Dense>

#include "lowrank/dense_matrix.hpp"
#include "lowrank/truncated_svd.hpp"

namespace lowrank {

/// Entrywise soft-thresholding: w - eps if w > eps, w + eps if w < -eps, 0 otherwise.
/// Proximal map of eps * ||X||_1. Throws InvalidArgument for eps < 0.
DenseMatrix shrink(const DenseMatrix& w, double eps);
Eigen::MatrixXd shrink(const Eigen::MatrixXd& w, double eps);
double shrink(double w, double eps);

/// Result of singular value thresholding in factored form:
/// A = U * diag(S) * V^T with S already shrunk (strictly positive).
struct SvtFactors {
  Eigen::MatrixXd U;
  Eigen::VectorXd S;
  Eigen::MatrixXd V;
  /// Every singular value computed by the final decomposition, descending.
  Eigen::VectorXd computed;
  /// Number of computed singular values strictly above the threshold.
  Index svp = 0;
  /// Rank actually decomposed, after any re-expansion of the hint.
  Index rank_used = 0;
  /// Backend decompositions performed (1 plus one per re-expansion).
  int decompositions = 0;

  Eigen::MatrixXd materialize() const { return U * S.asDiagonal() * V.transpose(); }
};

/// Singular value thresholding over the top-sv_hint triplets. When every
/// computed value is above eps and sv_hint < min(m, n), the hint is doubled
/// (capped at min(m, n)) and the decomposition retried so no above-threshold
/// value is dropped. A value equal to eps counts as below threshold.
/// With HintPolicy::fixed exactly sv_hint triplets are computed and svp
/// counts only among them.
enum class HintPolicy { expand, fixed };

SvtFactors svt_factors(const LinearOperator& w, double eps, Index sv_hint, const SvdOptions& opts = {},
                       HintPolicy policy = HintPolicy::expand);
SvtFactors svt_factors(const Eigen::MatrixXd& w, double eps, Index sv_hint, const SvdOptions& opts = {},
                       HintPolicy policy = HintPolicy::expand);

struct SvtResult {
  DenseMatrix a;
  Index svp = 0;
};

/// Proximal map of eps * ||X||_* restricted to the top sv_hint triplets.
SvtResult svt(const DenseMatrix& w, double eps, Index sv_hint, const SvdOptions& opts = {});

struct MatrixNorms {
  double nuclear = 0.0;
  double l1 = 0.0;
  double frobenius = 0.0;
  double spectral = 0.0;
  double max_abs = 0.0;
};

MatrixNorms norms(const DenseMatrix& w);

/// max(||Y||_2, ||Y||_inf / lambda); zero for the zero matrix.
double dual_gauge(const DenseMatrix& y, double lambda);
double dual_gauge(const Eigen::MatrixXd& y, double lambda);

/// Entrywise sign with sgn(0) = 0.
Eigen::MatrixXd sign_matrix(const Eigen::MatrixXd& w);

enum class Keep { inside, outside };

/// Zeroes the entries outside Omega (Keep::inside) or inside it (Keep::outside).
DenseMatrix project_omega(const DenseMatrix& w, const ObservedSet& omega, Keep keep);

/// Number of entries with |x| > 1e-12.
Index count_nonzeros(const Eigen::MatrixXd& w, double floor = 1e-12);

}  // namespace lowrank
