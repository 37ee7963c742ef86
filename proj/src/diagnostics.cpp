#include "lowrank/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lowrank/errors.hpp"
#include "lowrank/operators.hpp"
#include "lowrank/random.hpp"

namespace lowrank {

namespace {

void same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument(std::string(what) + ": shape " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                          " does not match " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

// Stream for the sign offset of the divergence demo, distinct from the
// generator's streams.
constexpr std::uint64_t kSignStream = 16;

}  // namespace

KktReport kkt_report(const Eigen::MatrixXd& D, const Eigen::MatrixXd& A, const Eigen::MatrixXd& E,
                     const Eigen::MatrixXd& Y, double lambda, double mu_prev, double delta_e_norm) {
  same_shape(A, D, "kkt_report A");
  same_shape(E, D, "kkt_report E");
  same_shape(Y, D, "kkt_report Y");
  if (!(lambda > 0.0)) throw InvalidArgument("kkt_report: lambda must be positive");
  if (!(mu_prev >= 0.0) || !(delta_e_norm >= 0.0))
    throw InvalidArgument("kkt_report: mu_prev and delta_e_norm must be nonnegative");
  const double dnorm = D.norm();
  const double scale = dnorm > 0.0 ? dnorm : 1.0;
  KktReport r;
  r.feas = (D - A - E).norm() / scale;
  r.dual_est = mu_prev * delta_e_norm / scale;
  r.spectral_y = Y.size() > 0 ? spectral_norm(Y) : 0.0;
  r.linf_y_over_lambda = Y.size() > 0 ? Y.cwiseAbs().maxCoeff() / lambda : 0.0;
  r.objective = (A.size() > 0 ? singular_values(A).sum() : 0.0) + lambda * E.cwiseAbs().sum();
  return r;
}

Eigen::MatrixXd dual_estimate(const Eigen::MatrixXd& D, const Eigen::MatrixXd& A, const Eigen::MatrixXd& E_prev,
                              const Eigen::MatrixXd& Y_prev, double mu_prev) {
  same_shape(A, D, "dual_estimate A");
  same_shape(E_prev, D, "dual_estimate E");
  same_shape(Y_prev, D, "dual_estimate Y");
  return Y_prev + mu_prev * (D - A - E_prev);
}

DualFeasibility dual_feasibility(const Eigen::MatrixXd& Y, double lambda) {
  DualFeasibility f;
  if (Y.size() == 0) return f;
  f.spectral = spectral_norm(Y);
  f.scaled_linf = Y.cwiseAbs().maxCoeff() / lambda;
  f.ok = f.spectral <= 1.0 + 1e-3 && f.scaled_linf <= 1.0 + 1e-3;
  return f;
}

std::vector<double> lyapunov_trace(const std::vector<LyapunovState>& trace,
                                   const std::optional<Eigen::MatrixXd>& x_star,
                                   const std::optional<Eigen::MatrixXd>& y_star) {
  if (!x_star || !y_star) throw InvalidArgument("lyapunov_trace: the oracle pair (X*, Y*) is required");
  same_shape(*y_star, *x_star, "lyapunov_trace oracle");
  std::vector<double> v;
  v.reserve(trace.size());
  for (const auto& s : trace) {
    same_shape(s.X, *x_star, "lyapunov_trace X");
    same_shape(s.Y, *y_star, "lyapunov_trace Y");
    if (!(s.mu > 0.0)) throw InvalidArgument("lyapunov_trace: mu must be positive");
    v.push_back((s.X - *x_star).squaredNorm() + (s.Y - *y_star).squaredNorm() / (s.mu * s.mu));
  }
  return v;
}

MonotonicityCheck check_nonincreasing(std::span<const double> v, double rel_slack) {
  MonotonicityCheck c;
  if (v.empty()) return c;
  const double slack = rel_slack * v.front();
  for (std::size_t k = 1; k < v.size(); ++k) {
    const double inc = v[k] - v[k - 1];
    if (inc > c.worst_increase) c.worst_increase = inc;
    if (inc > slack && c.ok) {
      c.ok = false;
      c.first_violation = static_cast<int>(k);
    }
  }
  return c;
}

SandwichCheck check_objective_sandwich(std::span<const double> objectives, std::span<const double> mus,
                                       double f_star, int fit) {
  if (objectives.size() != mus.size()) throw InvalidArgument("objective sandwich: length mismatch");
  if (fit < 1 || static_cast<std::size_t>(fit) > objectives.size())
    throw InvalidArgument("objective sandwich: need at least " + std::to_string(fit) + " iterates");
  SandwichCheck s;
  for (int k = 0; k < fit; ++k) s.c = std::max(s.c, std::abs(objectives[k] - f_star) * mus[k]);
  for (std::size_t k = static_cast<std::size_t>(fit); k < objectives.size(); ++k) {
    if (std::abs(objectives[k] - f_star) > s.c / mus[k]) {
      s.ok = false;
      s.first_violation = static_cast<int>(k);
      break;
    }
  }
  return s;
}

DivergenceOutcome divergence_demo(const RpcaInstance& instance, const DivergenceOptions& opts) {
  if (!(opts.growth > 1.0)) throw InvalidArgument("divergence_demo: growth must exceed 1");
  const Eigen::MatrixXd& D = instance.d.eigen();
  CounterRng rng(opts.seed, kSignStream);
  Eigen::MatrixXd e0(D.rows(), D.cols());
  for (Index i = 0; i < D.rows(); ++i)
    for (Index j = 0; j < D.cols(); ++j) e0(i, j) = (rng.next_u64() >> 63) ? opts.bad_e0_scale : -opts.bad_e0_scale;

  RpcaConfig cfg;
  cfg.lambda = instance.lambda;
  cfg.rho = opts.growth;
  cfg.max_iter = opts.max_iter;
  IalmOptions io;
  io.order = UpdateOrder::a_first;
  io.schedule = MuSchedule::geometric;
  io.mu_cap = opts.mu_cap;
  io.initial_e = std::move(e0);
  const SolveResult r = solve_ialm(instance.d, cfg, io);

  DivergenceOutcome out;
  out.iterations = r.iterations;
  out.final_error = (r.A.eigen() - instance.a_star.eigen()).norm() / instance.a_star.eigen().norm();
  out.stalled = !(out.final_error <= 1e-2);
  return out;
}

DivergenceOutcome divergence_demo(const RpcaInstance& instance, double bad_e0_scale, double growth) {
  DivergenceOptions o;
  o.bad_e0_scale = bad_e0_scale;
  o.growth = growth;
  return divergence_demo(instance, o);
}

double mc_dual_distance(const Eigen::MatrixXd& y_hat, const Eigen::MatrixXd& A, const ObservedSet& omega) {
  same_shape(y_hat, A, "mc_dual_distance");
  if (A.rows() != omega.rows() || A.cols() != omega.cols())
    throw InvalidArgument("mc_dual_distance: omega does not match the matrix shape");
  auto off_omega_norm = [&](Eigen::MatrixXd m) {
    for (const auto& e : omega.indices()) m(e.row, e.col) = 0.0;
    return m.norm();
  };
  double best = off_omega_norm(y_hat);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() > 0 && s(0) > 0.0) {
    Index r = 0;
    while (r < s.size() && s(r) > 1e-12 * s(0)) ++r;
    const Eigen::MatrixXd uv = svd.matrixU().leftCols(r) * svd.matrixV().leftCols(r).transpose();
    best = std::min(best, off_omega_norm(uv));
  }
  return best;
}

}  // namespace lowrank
