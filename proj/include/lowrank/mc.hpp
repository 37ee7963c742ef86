#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lowrank/dense_matrix.hpp"
#include "lowrank/rpca.hpp"
#include "lowrank/truncated_svd.hpp"

namespace lowrank {

struct McConfig {
  std::optional<double> mu0;  // default 1 / ||D||_2
  std::optional<double> rho;  // default rho_from_density(|Omega| / (m n))
  double eps1 = 1e-7;
  double eps2 = 1e-6;
  int max_iter = 500;
  int sv0 = 5;
  /// Successive singular value ratio above which the spectrum is cut.
  double gap_threshold = 2.0;
  /// Growth of the predicted rank when the prediction saturates.
  Index rank_increment = 10;
  /// geometric: mu grows by rho every iteration and the run stops on
  /// feasibility alone. adaptive: mu grows only when the dual estimate is
  /// below eps2, and stopping also requires it.
  MuSchedule schedule = MuSchedule::geometric;
  SvdOptions svd;

  void validate() const;
};

/// A = L R^T, never materialized densely by the solver.
struct FactoredMatrix {
  Eigen::MatrixXd L;  // m x k
  Eigen::MatrixXd R;  // n x k

  Index rows() const { return L.rows(); }
  Index cols() const { return R.rows(); }
  Index rank() const { return L.cols(); }
  Eigen::MatrixXd materialize() const { return L * R.transpose(); }
  /// Entries of A at every index of omega, in omega's order.
  std::vector<double> sample(const ObservedSet& omega) const;
};

struct McResult {
  FactoredMatrix A;
  /// Multiplier values on Omega; Y is zero elsewhere by construction.
  std::vector<double> y_omega;
  bool converged = false;
  int iterations = 0;
  std::vector<IterRecord> trace;
  double mu0 = 0.0;
  double rho = 0.0;
  std::vector<std::string> warnings;
};

struct McSnapshot {
  int iter;
  const FactoredMatrix& A;
  std::span<const double> a_omega;  // pi_Omega(A_k) on Omega
  std::span<const double> y_omega;  // Y_k on Omega
  double mu_used;
  double mu_next;
  /// ||E_k - E_{k-1}||_F from the factored identity.
  double delta_e_norm;
};

using McObserver = std::function<void(const McSnapshot&)>;

/// Matrix completion by inexact ALM. `values[k]` is the observed entry at
/// omega[k]; unobserved entries of D are zero. Throws InvalidArgument for an
/// empty omega, misaligned or non-finite values.
McResult solve_mc_ialm(const ObservedSet& omega, std::span<const double> values, const McConfig& cfg = {},
                       const McObserver& observer = {});

/// Rank kept after the gap cut: svp, or min(svp, index of the largest
/// successive ratio) when that ratio exceeds gap_threshold. A zero
/// denominator counts as an infinite ratio.
Index truncation_rank(Index svp, std::span<const double> singular_values, double gap_threshold = 2.0);

/// Next predicted rank for matrix completion: svn + 1 while below sv,
/// otherwise min(svn + increment, d).
Index predict_rank_mc(Index svp, Index sv, std::span<const double> singular_values, Index d,
                      double gap_threshold = 2.0, Index increment = 10);

/// Penalty growth factor for sampling density rho_s in (0, 1].
double rho_from_density(double rho_s);

}  // namespace lowrank
