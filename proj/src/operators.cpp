#include "lowrank/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

void require_nonnegative(double eps, const char* what) {
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw InvalidArgument(std::string(what) + ": threshold must be finite and >= 0, got " + std::to_string(eps));
}

template <class Source>
SvtFactors svt_impl(const Source& w, Index rows, Index cols, double eps, Index sv_hint, const SvdOptions& opts,
                     HintPolicy policy) {
  require_nonnegative(eps, "svt");
  const Index d = std::min(rows, cols);
  if (sv_hint < 1 || sv_hint > d)
    throw InvalidArgument("svt: sv_hint = " + std::to_string(sv_hint) + " outside [1, " + std::to_string(d) + "]");

  SvtFactors out;
  Index hint = sv_hint;
  TruncatedSVD t;
  for (;;) {
    t = truncated_svd(w, hint, opts);
    ++out.decompositions;
    out.svp = 0;
    while (out.svp < hint && t.S(out.svp) > eps) ++out.svp;
    if (out.svp < hint || hint == d || policy == HintPolicy::fixed) break;
    hint = std::min(2 * hint, d);
  }
  out.rank_used = hint;
  out.computed = t.S;
  out.U = t.U.leftCols(out.svp);
  out.V = t.V.leftCols(out.svp);
  out.S = t.S.head(out.svp).array() - eps;
  return out;
}

}  // namespace

double shrink(double w, double eps) {
  if (w > eps) return w - eps;
  if (w < -eps) return w + eps;
  return 0.0;
}

Eigen::MatrixXd shrink(const Eigen::MatrixXd& w, double eps) {
  require_nonnegative(eps, "shrink");
  return w.unaryExpr([eps](double x) { return shrink(x, eps); });
}

DenseMatrix shrink(const DenseMatrix& w, double eps) { return DenseMatrix(shrink(w.eigen(), eps)); }

SvtFactors svt_factors(const LinearOperator& w, double eps, Index sv_hint, const SvdOptions& opts,
                       HintPolicy policy) {
  return svt_impl(w, w.rows(), w.cols(), eps, sv_hint, opts, policy);
}

SvtFactors svt_factors(const Eigen::MatrixXd& w, double eps, Index sv_hint, const SvdOptions& opts,
                       HintPolicy policy) {
  return svt_impl(w, w.rows(), w.cols(), eps, sv_hint, opts, policy);
}

SvtResult svt(const DenseMatrix& w, double eps, Index sv_hint, const SvdOptions& opts) {
  const SvtFactors f = svt_factors(w.eigen(), eps, sv_hint, opts);
  return {DenseMatrix(f.materialize()), f.svp};
}

MatrixNorms norms(const DenseMatrix& w) {
  const Eigen::MatrixXd& m = w.eigen();
  MatrixNorms n;
  if (m.size() == 0) return n;
  const Eigen::VectorXd s = singular_values(m);
  n.nuclear = s.sum();
  n.spectral = s.size() > 0 ? s(0) : 0.0;
  n.l1 = m.cwiseAbs().sum();
  n.frobenius = m.norm();
  n.max_abs = m.cwiseAbs().maxCoeff();
  return n;
}

double dual_gauge(const Eigen::MatrixXd& y, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("dual_gauge: lambda must be positive, got " + std::to_string(lambda));
  if (y.size() == 0) return 0.0;
  const double max_abs = y.cwiseAbs().maxCoeff();
  if (max_abs == 0.0) return 0.0;
  return std::max(spectral_norm(y), max_abs / lambda);
}

double dual_gauge(const DenseMatrix& y, double lambda) { return dual_gauge(y.eigen(), lambda); }

Eigen::MatrixXd sign_matrix(const Eigen::MatrixXd& w) {
  return w.unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

DenseMatrix project_omega(const DenseMatrix& w, const ObservedSet& omega, Keep keep) {
  if (w.rows() != omega.rows() || w.cols() != omega.cols())
    throw InvalidArgument("project_omega: matrix is " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                          " but Omega is over " + std::to_string(omega.rows()) + "x" + std::to_string(omega.cols()));
  Eigen::MatrixXd out;
  if (keep == Keep::inside) {
    out = Eigen::MatrixXd::Zero(w.rows(), w.cols());
    for (const auto& e : omega.indices()) out(e.row, e.col) = w(e.row, e.col);
  } else {
    out = w.eigen();
    for (const auto& e : omega.indices()) out(e.row, e.col) = 0.0;
  }
  return DenseMatrix(std::move(out));
}

Index count_nonzeros(const Eigen::MatrixXd& w, double floor) {
  return static_cast<Index>((w.array().abs() > floor).count());
}

}  // namespace lowrank
