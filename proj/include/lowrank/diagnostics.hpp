#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lowrank/dense_matrix.hpp"
#include "lowrank/mc.hpp"
#include "lowrank/problem_gen.hpp"
#include "lowrank/rpca.hpp"

namespace lowrank {

struct KktReport {
  double feas = 0.0;      // ||D - A - E||_F / ||D||_F
  double dual_est = 0.0;  // mu_prev * ||dE||_F / ||D||_F
  double spectral_y = 0.0;
  double linf_y_over_lambda = 0.0;
  double objective = 0.0;  // ||A||_* + lambda ||E||_1
};

/// Throws InvalidArgument on shape mismatch or a non-positive lambda.
KktReport kkt_report(const Eigen::MatrixXd& D, const Eigen::MatrixXd& A, const Eigen::MatrixXd& E,
                     const Eigen::MatrixXd& Y, double lambda, double mu_prev, double delta_e_norm);

/// Y_hat = Y_prev + mu_prev (D - A - E_prev); lies in the subdifferential of
/// ||A||_* when A was produced by the SVT step.
Eigen::MatrixXd dual_estimate(const Eigen::MatrixXd& D, const Eigen::MatrixXd& A, const Eigen::MatrixXd& E_prev,
                              const Eigen::MatrixXd& Y_prev, double mu_prev);

struct DualFeasibility {
  double spectral = 0.0;
  double scaled_linf = 0.0;
  bool ok = true;
};

/// ok iff ||Y||_2 <= 1 + 1e-3 and ||Y||_inf / lambda <= 1 + 1e-3.
DualFeasibility dual_feasibility(const Eigen::MatrixXd& Y, double lambda);

/// Iterate state for the Lyapunov quantity. X is the primal block updated
/// second in each sweep (E for A-first order, A for E-first order).
struct LyapunovState {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
  double mu = 0.0;  // penalty that produces the next multiplier from Y
};

/// V_k = ||X_k - X*||_F^2 + mu_k^{-2} ||Y_k - Y*||_F^2. Throws InvalidArgument
/// when either oracle is missing or shapes disagree.
std::vector<double> lyapunov_trace(const std::vector<LyapunovState>& trace,
                                   const std::optional<Eigen::MatrixXd>& x_star,
                                   const std::optional<Eigen::MatrixXd>& y_star);

struct MonotonicityCheck {
  bool ok = true;
  int first_violation = -1;  // index k with v[k] > v[k-1] + slack
  double worst_increase = 0.0;
};

/// Flags v[k] - v[k-1] > rel_slack * v[0].
MonotonicityCheck check_nonincreasing(std::span<const double> v, double rel_slack = 1e-8);

struct SandwichCheck {
  bool ok = true;
  double c = 0.0;  // fitted constant
  int first_violation = -1;
};

/// |objective_k - f_star| <= C / mu_k with C the largest value of
/// |objective_k - f_star| mu_k over the first `fit` entries.
SandwichCheck check_objective_sandwich(std::span<const double> objectives, std::span<const double> mus,
                                       double f_star, int fit = 3);

struct DivergenceOptions {
  double bad_e0_scale = 1e3;
  double growth = 10.0;
  std::optional<double> mu_cap;
  int max_iter = 60;
  std::uint64_t seed = 0;
};

struct DivergenceOutcome {
  bool stalled = false;
  double final_error = 0.0;  // ||A - A*||_F / ||A*||_F
  int iterations = 0;
};

/// IALM in A-first order with mu_k = mu0 growth^k and E_0 offset by
/// bad_e0_scale times a random sign matrix. stalled iff the final relative
/// error exceeds 1e-2.
DivergenceOutcome divergence_demo(const RpcaInstance& instance, const DivergenceOptions& opts = {});
DivergenceOutcome divergence_demo(const RpcaInstance& instance, double bad_e0_scale, double growth);

/// Upper bound on dist(subdifferential of ||A||_*, matrices supported on
/// omega): the smaller off-omega norm of the candidates Y_hat and U V^T.
/// Dense; meant for desk-scale checks.
double mc_dual_distance(const Eigen::MatrixXd& y_hat, const Eigen::MatrixXd& A, const ObservedSet& omega);

}  // namespace lowrank
