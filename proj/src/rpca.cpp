#include "lowrank/rpca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lowrank/errors.hpp"
#include "lowrank/operators.hpp"

namespace lowrank {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument("RpcaConfig: " + message);
}

template <class T>
void check_positive(const std::optional<T>& v, const char* name) {
  if (v) require(std::isfinite(static_cast<double>(*v)) && *v > 0, std::string(name) + " must be positive");
}

SolveResult zero_result(const Eigen::MatrixXd& d, const ResolvedRpcaConfig& rc) {
  SolveResult r;
  r.A = DenseMatrix::zeros(d.rows(), d.cols());
  r.E = DenseMatrix::zeros(d.rows(), d.cols());
  r.Y = Eigen::MatrixXd::Zero(d.rows(), d.cols());
  r.converged = true;
  r.iterations = 1;
  r.trace.push_back(IterRecord{1, rc.mu0, 0.0, 0.0, 0, 0, 0, 0});
  r.config = rc;
  return r;
}

// Records a warning each time rank(A_k) drops; the rank sequence is only
// empirically monotone.
void note_rank(SolveResult& r, Index previous, Index current, int iter) {
  if (iter > 1 && current < previous)
    r.warnings.push_back("rank(A_k) decreased from " + std::to_string(previous) + " to " + std::to_string(current) +
                         " at iteration " + std::to_string(iter));
}

void finish(SolveResult& r, Eigen::MatrixXd a, Eigen::MatrixXd e, Eigen::MatrixXd y, const ResolvedRpcaConfig& rc) {
  r.A = DenseMatrix(std::move(a));
  r.E = DenseMatrix(std::move(e));
  r.Y = std::move(y);
  r.iterations = static_cast<int>(r.trace.size());
  r.config = rc;
}

void require_shape(const std::optional<Eigen::MatrixXd>& m, const Eigen::MatrixXd& d, const char* name) {
  if (m && (m->rows() != d.rows() || m->cols() != d.cols()))
    throw InvalidArgument(std::string(name) + " must have the shape of D");
}

}  // namespace

std::string_view to_string(RpcaAlgorithm alg) {
  switch (alg) {
    case RpcaAlgorithm::it: return "it";
    case RpcaAlgorithm::apg: return "apg";
    case RpcaAlgorithm::ealm: return "ealm";
    case RpcaAlgorithm::ialm: return "ialm";
  }
  return "?";
}

RpcaAlgorithm parse_rpca_algorithm(std::string_view name) {
  if (name == "it") return RpcaAlgorithm::it;
  if (name == "apg") return RpcaAlgorithm::apg;
  if (name == "ealm") return RpcaAlgorithm::ealm;
  if (name == "ialm") return RpcaAlgorithm::ialm;
  throw InvalidArgument("unknown RPCA algorithm '" + std::string(name) + "' (expected it|apg|ealm|ialm)");
}

void RpcaConfig::validate() const {
  check_positive(lambda, "lambda");
  check_positive(mu0, "mu0");
  if (rho) require(std::isfinite(*rho) && *rho > 1.0, "rho must exceed 1");
  check_positive(eps1, "eps1");
  check_positive(eps2, "eps2");
  check_positive(max_iter, "max_iter");
  check_positive(sv0, "sv0");
  check_positive(it_tau, "it_tau");
  check_positive(it_delta, "it_delta");
  check_positive(apg_mu_bar, "apg_mu_bar");
  if (apg_eta) require(*apg_eta > 0.0 && *apg_eta < 1.0, "apg_eta must lie in (0, 1)");
  check_positive(inner_tol, "inner_tol");
  check_positive(max_inner_iter, "max_inner_iter");
}

double apg_next_t(double t) { return 0.5 * (1.0 + std::sqrt(4.0 * t * t + 1.0)); }

Index round_half_up(double x) { return static_cast<Index>(std::floor(x + 0.5)); }

Index predict_rank(Index svp, Index sv, Index d) {
  if (svp < 0 || svp > sv || sv > d || d < 1)
    throw InvalidArgument("predict_rank: require 0 <= svp <= sv <= d, got svp=" + std::to_string(svp) +
                          " sv=" + std::to_string(sv) + " d=" + std::to_string(d));
  if (svp < sv) return svp + 1;
  return std::min(svp + round_half_up(0.05 * static_cast<double>(d)), d);
}

ResolvedRpcaConfig resolve_config(RpcaAlgorithm alg, const RpcaConfig& cfg, const Eigen::MatrixXd& d) {
  cfg.validate();
  ResolvedRpcaConfig rc;
  rc.algorithm = alg;
  rc.lambda = cfg.lambda.value_or(1.0 / std::sqrt(static_cast<double>(d.rows())));
  const double norm_two = d.size() > 0 && d.cwiseAbs().maxCoeff() > 0.0 ? spectral_norm(d) : 0.0;
  const double safe_norm = norm_two > 0.0 ? norm_two : 1.0;
  rc.eps1 = cfg.eps1.value_or(1e-7);
  rc.eps2 = cfg.eps2.value_or(1e-5);
  rc.inner_tol = cfg.inner_tol.value_or(1e-6);
  rc.max_inner_iter = cfg.max_inner_iter.value_or(1000);
  rc.it_tau = cfg.it_tau.value_or(10.0 * safe_norm);
  rc.it_delta = cfg.it_delta.value_or(1.0);
  rc.apg_eta = cfg.apg_eta.value_or(0.9);
  switch (alg) {
    case RpcaAlgorithm::it:
      rc.mu0 = cfg.mu0.value_or(rc.it_delta);
      rc.rho = cfg.rho.value_or(1.0);  // unused
      rc.max_iter = cfg.max_iter.value_or(100000);
      rc.sv0 = cfg.sv0.value_or(10);
      break;
    case RpcaAlgorithm::apg:
      rc.mu0 = cfg.mu0.value_or(0.99 * safe_norm);
      rc.rho = cfg.rho.value_or(1.0);  // unused; continuation uses apg_eta
      rc.max_iter = cfg.max_iter.value_or(1000);
      rc.sv0 = cfg.sv0.value_or(5);
      rc.eps1 = cfg.eps1.value_or(1e-8);
      break;
    case RpcaAlgorithm::ealm: {
      const Eigen::MatrixXd sgn = sign_matrix(d);
      const double sgn_norm = norm_two > 0.0 ? spectral_norm(sgn) : 1.0;
      rc.mu0 = cfg.mu0.value_or(0.5 / sgn_norm);
      rc.rho = cfg.rho.value_or(6.0);
      rc.max_iter = cfg.max_iter.value_or(100);
      rc.sv0 = cfg.sv0.value_or(10);
      break;
    }
    case RpcaAlgorithm::ialm:
      rc.mu0 = cfg.mu0.value_or(1.25 / safe_norm);
      rc.rho = cfg.rho.value_or(1.6);
      rc.max_iter = cfg.max_iter.value_or(1000);
      rc.sv0 = cfg.sv0.value_or(10);
      break;
  }
  rc.apg_mu_bar = cfg.apg_mu_bar.value_or(1e-9 * rc.mu0);
  return rc;
}

SolveResult solve_it(const DenseMatrix& dm, const RpcaConfig& cfg) {
  const Eigen::MatrixXd& D = dm.eigen();
  const ResolvedRpcaConfig rc = resolve_config(RpcaAlgorithm::it, cfg, D);
  const double dnorm = D.norm();
  if (dnorm == 0.0) return zero_result(D, rc);

  const Index dim = std::min(D.rows(), D.cols());
  const double tau = rc.it_tau;
  const double delta = rc.it_delta;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(D.rows(), D.cols());
  Eigen::MatrixXd E = A;
  Eigen::MatrixXd Y = A;
  Index sv = std::min<Index>(rc.sv0, dim);
  Index prev_rank = 0;

  SolveResult r;
  for (int k = 1; k <= rc.max_iter; ++k) {
    const SvtFactors f = svt_factors(Y, tau, sv, cfg.svd);
    ++r.svd_count;
    Eigen::MatrixXd E_new = shrink(Y, rc.lambda * tau);
    A = f.materialize();
    const Eigen::MatrixXd Z = D - A - E_new;
    Y += delta * Z;
    const double dE = (E_new - E).norm();
    E = std::move(E_new);

    const IterRecord rec{k, delta, Z.norm() / dnorm, delta * dE / dnorm, f.svp, count_nonzeros(E), sv, f.svp};
    r.trace.push_back(rec);
    note_rank(r, prev_rank, f.svp, k);
    prev_rank = f.svp;
    sv = predict_rank(f.svp, f.rank_used, dim);
    if (rec.feas < rc.eps1) {
      r.converged = true;
      break;
    }
  }
  finish(r, std::move(A), std::move(E), std::move(Y), rc);
  return r;
}

SolveResult solve_apg(const DenseMatrix& dm, const RpcaConfig& cfg) {
  const Eigen::MatrixXd& D = dm.eigen();
  const ResolvedRpcaConfig rc = resolve_config(RpcaAlgorithm::apg, cfg, D);
  const double dnorm = D.norm();
  if (dnorm == 0.0) return zero_result(D, rc);

  const Index dim = std::min(D.rows(), D.cols());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(D.rows(), D.cols());
  Eigen::MatrixXd A_prev = A;
  Eigen::MatrixXd E = A;
  Eigen::MatrixXd E_prev = A;
  double t = 1.0;
  double t_prev = 1.0;
  double mu = rc.mu0;
  Index sv = std::min<Index>(rc.sv0, dim);
  Index prev_rank = 0;

  SolveResult r;
  for (int k = 1; k <= rc.max_iter; ++k) {
    const double momentum = (t_prev - 1.0) / t;
    const Eigen::MatrixXd YA = A + momentum * (A - A_prev);
    const Eigen::MatrixXd YE = E + momentum * (E - E_prev);
    const Eigen::MatrixXd half_grad = 0.5 * (YA + YE - D);

    const SvtFactors f = svt_factors(Eigen::MatrixXd(YA - half_grad), 0.5 * mu, sv, cfg.svd);
    ++r.svd_count;
    Eigen::MatrixXd A_new = f.materialize();
    Eigen::MatrixXd E_new = shrink(Eigen::MatrixXd(YE - half_grad), 0.5 * rc.lambda * mu);

    // Subgradient-based optimality residual of the relaxed problem.
    const Eigen::MatrixXd coupling = A_new + E_new - YA - YE;
    const double residual = std::sqrt((2.0 * (YA - A_new) + coupling).squaredNorm() +
                                      (2.0 * (YE - E_new) + coupling).squaredNorm());
    const double scale = 2.0 * std::max(1.0, std::sqrt(A_new.squaredNorm() + E_new.squaredNorm()));

    const double dE = (E_new - E).norm();
    A_prev = std::move(A);
    A = std::move(A_new);
    E_prev = std::move(E);
    E = std::move(E_new);

    const double feas = (D - A - E).norm() / dnorm;
    r.trace.push_back(IterRecord{k, mu, feas, mu * dE / dnorm, f.svp, count_nonzeros(E), sv, f.svp});
    note_rank(r, prev_rank, f.svp, k);
    prev_rank = f.svp;
    sv = predict_rank(f.svp, f.rank_used, dim);

    const double t_next = apg_next_t(t);
    t_prev = t;
    t = t_next;
    mu = std::max(rc.apg_eta * mu, rc.apg_mu_bar);

    if (residual / scale <= rc.eps1) {
      r.converged = true;
      break;
    }
  }
  finish(r, std::move(A), std::move(E), Eigen::MatrixXd::Zero(D.rows(), D.cols()), rc);
  return r;
}

SolveResult solve_ealm(const DenseMatrix& dm, const RpcaConfig& cfg, const IterationObserver& observer) {
  const Eigen::MatrixXd& D = dm.eigen();
  const ResolvedRpcaConfig rc = resolve_config(RpcaAlgorithm::ealm, cfg, D);
  const double dnorm = D.norm();
  if (dnorm == 0.0) return zero_result(D, rc);

  const Index dim = std::min(D.rows(), D.cols());
  const Eigen::MatrixXd sgn = sign_matrix(D);
  Eigen::MatrixXd Y = sgn / dual_gauge(sgn, rc.lambda);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(D.rows(), D.cols());
  Eigen::MatrixXd E = A;
  double mu = rc.mu0;
  Index sv = std::min<Index>(rc.sv0, dim);
  Index prev_rank = 0;

  SolveResult r;
  if (observer) observer({0, A, E, Y, 0.0, mu, 0.0});
  for (int k = 1; k <= rc.max_iter; ++k) {
    const double inv_mu = 1.0 / mu;
    const Eigen::MatrixXd E_outer = E;
    SvtFactors f;
    Index sv_used = sv;
    for (int j = 0; j < rc.max_inner_iter; ++j) {
      Eigen::MatrixXd E_new = shrink(Eigen::MatrixXd(D - A + inv_mu * Y), rc.lambda * inv_mu);
      sv_used = sv;
      f = svt_factors(Eigen::MatrixXd(D - E_new + inv_mu * Y), inv_mu, sv, cfg.svd);
      ++r.svd_count;
      Eigen::MatrixXd A_new = f.materialize();
      sv = predict_rank(f.svp, f.rank_used, dim);
      const bool stalled = (A_new - A).norm() / dnorm < rc.inner_tol && (E_new - E).norm() / dnorm < rc.inner_tol;
      A = std::move(A_new);
      E = std::move(E_new);
      if (stalled) break;
    }
    const Eigen::MatrixXd Z = D - A - E;
    Y += mu * Z;

    const IterRecord rec{k, mu, Z.norm() / dnorm, mu * (E - E_outer).norm() / dnorm, f.svp, count_nonzeros(E),
                         sv_used, f.svp};
    r.trace.push_back(rec);
    note_rank(r, prev_rank, f.svp, k);
    prev_rank = f.svp;
    const double mu_next = rc.rho * mu;
    if (observer) observer({k, A, E, Y, mu, mu_next, f.S.sum()});
    if (rec.feas < rc.eps1) {
      r.converged = true;
      break;
    }
    mu = mu_next;
    sv = std::min(f.svp + round_half_up(0.1 * static_cast<double>(dim)), dim);
  }
  finish(r, std::move(A), std::move(E), std::move(Y), rc);
  return r;
}

SolveResult solve_ialm(const DenseMatrix& dm, const RpcaConfig& cfg, const IalmOptions& opts) {
  const Eigen::MatrixXd& D = dm.eigen();
  const ResolvedRpcaConfig rc = resolve_config(RpcaAlgorithm::ialm, cfg, D);
  require_shape(opts.initial_a, D, "initial_a");
  require_shape(opts.initial_e, D, "initial_e");
  const double dnorm = D.norm();
  if (dnorm == 0.0) return zero_result(D, rc);

  const Index dim = std::min(D.rows(), D.cols());
  Eigen::MatrixXd Y = D / dual_gauge(D, rc.lambda);
  Eigen::MatrixXd A = opts.initial_a.value_or(Eigen::MatrixXd::Zero(D.rows(), D.cols()));
  Eigen::MatrixXd E = opts.initial_e.value_or(Eigen::MatrixXd::Zero(D.rows(), D.cols()));
  double mu = opts.mu_cap ? std::min(rc.mu0, *opts.mu_cap) : rc.mu0;
  Index sv = std::min<Index>(rc.sv0, dim);
  Index prev_rank = 0;

  SolveResult r;
  if (opts.observer) opts.observer({0, A, E, Y, 0.0, mu, 0.0});
  for (int k = 1; k <= rc.max_iter; ++k) {
    const double inv_mu = 1.0 / mu;
    Eigen::MatrixXd E_new;
    SvtFactors f;
    if (opts.order == UpdateOrder::e_first) {
      E_new = shrink(Eigen::MatrixXd(D - A + inv_mu * Y), rc.lambda * inv_mu);
      f = svt_factors(Eigen::MatrixXd(D - E_new + inv_mu * Y), inv_mu, sv, cfg.svd);
      A = f.materialize();
    } else {
      f = svt_factors(Eigen::MatrixXd(D - E + inv_mu * Y), inv_mu, sv, cfg.svd);
      A = f.materialize();
      E_new = shrink(Eigen::MatrixXd(D - A + inv_mu * Y), rc.lambda * inv_mu);
    }
    ++r.svd_count;
    const Eigen::MatrixXd Z = D - A - E_new;
    Y += mu * Z;
    const double dE = (E_new - E).norm();
    E = std::move(E_new);

    const IterRecord rec{k, mu, Z.norm() / dnorm, mu * dE / dnorm, f.svp, count_nonzeros(E), sv, f.svp};
    r.trace.push_back(rec);
    note_rank(r, prev_rank, f.svp, k);
    prev_rank = f.svp;

    double mu_next = mu;
    if (opts.schedule == MuSchedule::geometric || rec.dual_est < rc.eps2) mu_next = rc.rho * mu;
    if (opts.mu_cap) mu_next = std::min(mu_next, *opts.mu_cap);

    if (opts.observer) opts.observer({k, A, E, Y, mu, mu_next, f.S.sum()});
    if (rec.feas < rc.eps1 && rec.dual_est < rc.eps2) {
      r.converged = true;
      break;
    }
    mu = mu_next;
    sv = predict_rank(f.svp, f.rank_used, dim);
  }
  finish(r, std::move(A), std::move(E), std::move(Y), rc);
  return r;
}

SolveResult solve_rpca(RpcaAlgorithm alg, const DenseMatrix& d, const RpcaConfig& cfg) {
  switch (alg) {
    case RpcaAlgorithm::it: return solve_it(d, cfg);
    case RpcaAlgorithm::apg: return solve_apg(d, cfg);
    case RpcaAlgorithm::ealm: return solve_ealm(d, cfg);
    case RpcaAlgorithm::ialm: return solve_ialm(d, cfg);
  }
  throw InvalidArgument("unknown RPCA algorithm");
}

}  // namespace lowrank
