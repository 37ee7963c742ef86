#include "lowrank/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lowrank/errors.hpp"
#include "lowrank/operators.hpp"

namespace lowrank {

namespace {

// S + L R^T where S is supported on omega.
class SparsePlusLowRank final : public LinearOperator {
 public:
  SparsePlusLowRank(const ObservedSet& omega, const std::vector<double>& sparse, const FactoredMatrix& low_rank)
      : omega_(omega), sparse_(sparse), lr_(low_rank) {}

  Index rows() const override { return omega_.rows(); }
  Index cols() const override { return omega_.cols(); }

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override {
    y = Eigen::VectorXd::Zero(rows());
    const auto& offsets = omega_.row_offsets();
    for (Index i = 0; i < rows(); ++i) {
      double acc = 0.0;
      for (std::size_t k = offsets[static_cast<std::size_t>(i)]; k < offsets[static_cast<std::size_t>(i) + 1]; ++k)
        acc += sparse_[k] * x(omega_[k].col);
      y(i) = acc;
    }
    if (lr_.rank() > 0) y.noalias() += lr_.L * (lr_.R.transpose() * x);
  }

  void apply_transpose(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override {
    y = Eigen::VectorXd::Zero(cols());
    for (std::size_t k = 0; k < omega_.size(); ++k) y(omega_[k].col) += sparse_[k] * x(omega_[k].row);
    if (lr_.rank() > 0) y.noalias() += lr_.R * (lr_.L.transpose() * x);
  }

  Eigen::MatrixXd to_dense() const override {
    Eigen::MatrixXd m = lr_.rank() > 0 ? lr_.materialize() : Eigen::MatrixXd::Zero(rows(), cols());
    for (std::size_t k = 0; k < omega_.size(); ++k) m(omega_[k].row, omega_[k].col) += sparse_[k];
    return m;
  }

 private:
  const ObservedSet& omega_;
  const std::vector<double>& sparse_;
  const FactoredMatrix& lr_;
};

class SparseOperator final : public LinearOperator {
 public:
  SparseOperator(const ObservedSet& omega, std::span<const double> values) : omega_(omega), values_(values) {}
  Index rows() const override { return omega_.rows(); }
  Index cols() const override { return omega_.cols(); }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override {
    y = Eigen::VectorXd::Zero(rows());
    for (std::size_t k = 0; k < omega_.size(); ++k) y(omega_[k].row) += values_[k] * x(omega_[k].col);
  }
  void apply_transpose(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override {
    y = Eigen::VectorXd::Zero(cols());
    for (std::size_t k = 0; k < omega_.size(); ++k) y(omega_[k].col) += values_[k] * x(omega_[k].row);
  }
  Eigen::MatrixXd to_dense() const override {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows(), cols());
    for (std::size_t k = 0; k < omega_.size(); ++k) m(omega_[k].row, omega_[k].col) = values_[k];
    return m;
  }

 private:
  const ObservedSet& omega_;
  std::span<const double> values_;
};

// ||A1 - A0||_F for factored A1 = L1 R1^T, A0 = L0 R0^T. Orthogonalizing the
// stacked right factor avoids the cancellation of a Gram-matrix expansion.
double factored_distance(const FactoredMatrix& a1, const FactoredMatrix& a0) {
  const Index k = a1.rank() + a0.rank();
  if (k == 0) return 0.0;
  Eigen::MatrixXd left(a1.rows(), k);
  Eigen::MatrixXd right(a1.cols(), k);
  left << a1.L, -a0.L;
  right << a1.R, a0.R;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(right);
  const Index t = std::min(k, right.rows());
  const Eigen::MatrixXd T = qr.matrixQR().topRows(t).triangularView<Eigen::Upper>();
  return (left * T.transpose()).norm();
}

}  // namespace

std::vector<double> FactoredMatrix::sample(const ObservedSet& omega) const {
  std::vector<double> out(omega.size(), 0.0);
  if (rank() == 0) return out;
  const Eigen::MatrixXd Lt = L.transpose();
  const Eigen::MatrixXd Rt = R.transpose();
  for (std::size_t k = 0; k < omega.size(); ++k) out[k] = Lt.col(omega[k].row).dot(Rt.col(omega[k].col));
  return out;
}

void McConfig::validate() const {
  auto fail = [](const std::string& m) { throw InvalidArgument("McConfig: " + m); };
  if (mu0 && !(*mu0 > 0.0 && std::isfinite(*mu0))) fail("mu0 must be positive");
  if (rho && !(*rho > 1.0 && std::isfinite(*rho))) fail("rho must exceed 1");
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) fail("tolerances must be positive");
  if (max_iter < 1) fail("max_iter must be positive");
  if (sv0 < 1) fail("sv0 must be positive");
  if (!(gap_threshold > 0.0)) fail("gap_threshold must be positive");
  if (rank_increment < 1) fail("rank_increment must be positive");
}

double rho_from_density(double rho_s) {
  if (!(rho_s > 0.0 && rho_s <= 1.0))
    throw InvalidArgument("rho_from_density: sampling density must lie in (0, 1], got " + std::to_string(rho_s));
  return 1.2172 + 1.8588 * rho_s;
}

Index truncation_rank(Index svp, std::span<const double> s, double gap_threshold) {
  if (s.empty()) throw InvalidArgument("truncation_rank: no singular values");
  double max_gap = 0.0;
  Index max_id = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    double ratio = 1.0;
    if (s[i + 1] > 0.0)
      ratio = s[i] / s[i + 1];
    else if (s[i] > 0.0)
      ratio = std::numeric_limits<double>::infinity();
    if (ratio > max_gap) {
      max_gap = ratio;
      max_id = static_cast<Index>(i) + 1;
    }
  }
  return max_gap > gap_threshold ? std::min(svp, max_id) : svp;
}

Index predict_rank_mc(Index svp, Index sv, std::span<const double> s, Index d, double gap_threshold, Index increment) {
  if (s.empty()) throw InvalidArgument("predict_rank_mc: no singular values");
  if (static_cast<Index>(s.size()) != sv)
    throw InvalidArgument("predict_rank_mc: expected " + std::to_string(sv) + " singular values, got " +
                          std::to_string(s.size()));
  if (svp < 0 || svp > sv || sv > d) throw InvalidArgument("predict_rank_mc: require 0 <= svp <= sv <= d");
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i] < s[i + 1]) throw InvalidArgument("predict_rank_mc: singular values must be descending");
  const Index svn = truncation_rank(svp, s, gap_threshold);
  if (svn < sv) return svn + 1;
  return std::min(svn + increment, d);
}

McResult solve_mc_ialm(const ObservedSet& omega, std::span<const double> values, const McConfig& cfg,
                       const McObserver& observer) {
  cfg.validate();
  if (omega.empty()) throw InvalidArgument("solve_mc_ialm: no observed entries");
  if (values.size() != omega.size())
    throw InvalidArgument("solve_mc_ialm: " + std::to_string(values.size()) + " values for " +
                          std::to_string(omega.size()) + " observed entries");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidArgument("solve_mc_ialm: observed values must be finite");

  const Index m = omega.rows();
  const Index n = omega.cols();
  const Index dim = std::min(m, n);
  const std::size_t p = omega.size();
  const Eigen::Map<const Eigen::VectorXd> d_vec(values.data(), static_cast<Index>(p));
  const double dnorm = d_vec.norm();

  McResult res;
  res.A.L = Eigen::MatrixXd::Zero(m, 0);
  res.A.R = Eigen::MatrixXd::Zero(n, 0);
  res.y_omega.assign(p, 0.0);
  if (dnorm == 0.0) {
    res.converged = true;
    res.iterations = 1;
    res.trace.push_back(IterRecord{1, 0.0, 0.0, 0.0, 0, 0, 0, 0});
    return res;
  }

  const double rho_s = static_cast<double>(p) / (static_cast<double>(m) * static_cast<double>(n));
  double mu = cfg.mu0.value_or(1.0 / spectral_norm(SparseOperator(omega, values)));
  const double rho = cfg.rho.value_or(rho_from_density(rho_s));
  res.mu0 = mu;
  res.rho = rho;

  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Index>(p));
  Eigen::VectorXd a_omega = Eigen::VectorXd::Zero(static_cast<Index>(p));
  std::vector<double> sparse(p);
  Index sv = std::min<Index>(cfg.sv0, dim);
  Index prev_rank = 0;

  for (int k = 1; k <= cfg.max_iter; ++k) {
    const double inv_mu = 1.0 / mu;
    // D - E_k + Y_k / mu = (D + Y_k / mu - pi_Omega(A_k)) + A_k
    for (std::size_t t = 0; t < p; ++t)
      sparse[t] = values[t] + inv_mu * y(static_cast<Index>(t)) - a_omega(static_cast<Index>(t));
    const SvtFactors f = svt_factors(SparsePlusLowRank(omega, sparse, res.A), inv_mu, sv, cfg.svd, HintPolicy::fixed);

    const std::span<const double> computed(f.computed.data(), static_cast<std::size_t>(f.computed.size()));
    const Index svn = f.svp > 0 ? truncation_rank(f.svp, computed, cfg.gap_threshold) : 0;
    FactoredMatrix a_next{f.U.leftCols(svn) * f.S.head(svn).asDiagonal(), f.V.leftCols(svn)};
    const std::vector<double> sampled = a_next.sample(omega);
    const Eigen::Map<const Eigen::VectorXd> a_omega_next(sampled.data(), static_cast<Index>(p));

    // D - A_{k+1} - E_{k+1} = pi_Omega(D - A_{k+1})
    const Eigen::VectorXd z = d_vec - a_omega_next;
    y += mu * z;

    const double da = factored_distance(a_next, res.A);
    const double dpa = (a_omega_next - a_omega).norm();
    const double de = std::sqrt(std::max(0.0, da * da - dpa * dpa));
    const double feas = z.norm() / dnorm;
    const double dual_est = std::min(mu, std::sqrt(mu)) * de / dnorm;

    res.trace.push_back(IterRecord{k, mu, feas, dual_est, svn, 0, sv, f.svp});
    if (k > 1 && svn < prev_rank)
      res.warnings.push_back("rank(A_k) decreased from " + std::to_string(prev_rank) + " to " + std::to_string(svn) +
                             " at iteration " + std::to_string(k));
    prev_rank = svn;

    res.A = std::move(a_next);
    a_omega = a_omega_next;
    const double mu_next = (cfg.schedule == MuSchedule::geometric || dual_est < cfg.eps2) ? rho * mu : mu;
    if (observer) {
      observer({k, res.A, std::span<const double>(a_omega.data(), p), std::span<const double>(y.data(), p), mu,
                mu_next, de});
    }
    // Under geometric growth sqrt(mu) outpaces ||dE||, so only feasibility is tested.
    if (feas < cfg.eps1 && (cfg.schedule == MuSchedule::geometric || dual_est < cfg.eps2)) {
      res.converged = true;
      break;
    }
    sv = predict_rank_mc(f.svp, f.rank_used, computed, dim, cfg.gap_threshold, cfg.rank_increment);
    mu = mu_next;
  }
  res.iterations = static_cast<int>(res.trace.size());
  res.y_omega.assign(y.data(), y.data() + y.size());
  return res;
}

}  // namespace lowrank
