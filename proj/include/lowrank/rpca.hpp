#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lowrank/dense_matrix.hpp"
#include "lowrank/truncated_svd.hpp"

namespace lowrank {

enum class RpcaAlgorithm { it, apg, ealm, ialm };

std::string_view to_string(RpcaAlgorithm alg);
/// Accepts "it", "apg", "ealm", "ialm"; throws InvalidArgument otherwise.
RpcaAlgorithm parse_rpca_algorithm(std::string_view name);

/// Solver parameters. Unset fields take the per-algorithm defaults, several
/// of which depend on the data (e.g. IALM mu0 = 1.25 / ||D||_2).
struct RpcaConfig {
  std::optional<double> lambda;
  std::optional<double> mu0;
  std::optional<double> rho;
  std::optional<double> eps1;  // primal feasibility tolerance
  std::optional<double> eps2;  // dual tolerance
  std::optional<int> max_iter;
  std::optional<int> sv0;
  std::optional<double> it_tau;
  std::optional<double> it_delta;
  std::optional<double> apg_mu_bar;
  std::optional<double> apg_eta;
  std::optional<double> inner_tol;
  std::optional<int> max_inner_iter;
  SvdOptions svd;

  /// Throws InvalidArgument if any set field is out of range.
  void validate() const;
};

/// RpcaConfig with every default filled in for one algorithm and input.
struct ResolvedRpcaConfig {
  RpcaAlgorithm algorithm = RpcaAlgorithm::ialm;
  double lambda = 0.0;
  double mu0 = 0.0;
  double rho = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  int max_iter = 0;
  int sv0 = 0;
  double it_tau = 0.0;
  double it_delta = 0.0;
  double apg_mu_bar = 0.0;
  double apg_eta = 0.0;
  double inner_tol = 0.0;
  int max_inner_iter = 0;
};

ResolvedRpcaConfig resolve_config(RpcaAlgorithm alg, const RpcaConfig& cfg, const Eigen::MatrixXd& d);

/// One (outer) iteration of a solver.
struct IterRecord {
  int iter = 0;
  double mu = 0.0;        // penalty used by this iteration (IT: step size)
  double feas = 0.0;      // ||D - A_k - E_k||_F / ||D||_F
  double dual_est = 0.0;  // mu_{k-1} ||E_k - E_{k-1}||_F / ||D||_F
  Index rank_a = 0;
  Index e_card = 0;
  Index sv_pred = 0;  // predicted rank handed to the SVT
  Index svp = 0;      // singular values above threshold
};

struct SolveResult {
  DenseMatrix A;
  DenseMatrix E;
  /// Final Lagrange multiplier (zero for APG, which has none).
  Eigen::MatrixXd Y;
  bool converged = false;
  int iterations = 0;
  int svd_count = 0;
  std::vector<IterRecord> trace;
  ResolvedRpcaConfig config;
  /// Non-fatal diagnostics, e.g. rank(A_k) decreasing between iterations.
  std::vector<std::string> warnings;
};

/// Full iterate state, handed to observers after every (outer) iteration.
struct IterationSnapshot {
  int iter;
  const Eigen::MatrixXd& A;
  const Eigen::MatrixXd& E;
  const Eigen::MatrixXd& Y;
  double mu_used;
  double mu_next;
  double nuclear_norm_a;  // ||A||_* from the thresholded singular values
};

using IterationObserver = std::function<void(const IterationSnapshot&)>;

enum class UpdateOrder { e_first, a_first };
enum class MuSchedule {
  adaptive,   // mu grows by rho iff mu ||dE||_F / ||D||_F < eps2
  geometric,  // mu grows by rho every iteration
};

struct IalmOptions {
  UpdateOrder order = UpdateOrder::e_first;
  MuSchedule schedule = MuSchedule::adaptive;
  std::optional<double> mu_cap;
  std::optional<Eigen::MatrixXd> initial_a;
  std::optional<Eigen::MatrixXd> initial_e;
  IterationObserver observer;
};

/// Iterative thresholding on the tau-relaxed problem with dual step delta.
SolveResult solve_it(const DenseMatrix& d, const RpcaConfig& cfg = {});

/// Accelerated proximal gradient with continuation on mu.
SolveResult solve_apg(const DenseMatrix& d, const RpcaConfig& cfg = {});

/// Exact augmented Lagrange multipliers: each outer step solves its
/// subproblem by alternating E/A updates until the iterates stall.
SolveResult solve_ealm(const DenseMatrix& d, const RpcaConfig& cfg = {}, const IterationObserver& observer = {});

/// Inexact augmented Lagrange multipliers: one E/A sweep per multiplier step.
SolveResult solve_ialm(const DenseMatrix& d, const RpcaConfig& cfg = {}, const IalmOptions& opts = {});

SolveResult solve_rpca(RpcaAlgorithm alg, const DenseMatrix& d, const RpcaConfig& cfg = {});

/// Next predicted SVT rank: svp + 1 while below the prediction, otherwise
/// min(svp + round(0.05 d), d). Requires svp <= sv <= d.
Index predict_rank(Index svp, Index sv, Index d);

/// APG momentum sequence: the root of t'^2 - t' = t^2.
double apg_next_t(double t);

/// round() with halves rounded up.
Index round_half_up(double x);

}  // namespace lowrank
