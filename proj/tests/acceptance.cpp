// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lowrank/diagnostics.hpp"
#include "lowrank/mc.hpp"
#include "lowrank/operators.hpp"
#include "lowrank/problem_gen.hpp"
#include "lowrank/random.hpp"
#include "lowrank/rpca.hpp"
#include "lowrank/truncated_svd.hpp"

using namespace lowrank;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& a_star) { return (a - a_star).norm() / a_star.norm(); }

Index final_rank(const SolveResult& r) { return r.trace.empty() ? 0 : r.trace.back().rank_a; }

// m = 500 instance shared by criteria 1 to 4.
struct Rpca500 {
  RpcaInstance inst = gen_rpca(500, 25, 0.05, 1);
  SolveResult ialm, ealm, apg;
  Rpca500() {
    RpcaConfig cfg;
    cfg.lambda = inst.lambda;
    ialm = solve_ialm(inst.d, cfg);
    ealm = solve_ealm(inst.d, cfg);
    apg = solve_apg(inst.d, cfg);
  }
};

void criterion_1(const Rpca500& t) {
  const double err = rel_error(t.ialm.A.eigen(), t.inst.a_star.eigen());
  const Index card = count_nonzeros(t.ialm.E.eigen());
  const bool ok = t.ialm.converged && final_rank(t.ialm) == 25 && std::abs(card - 12500) <= 20 && err <= 1e-6 &&
                  t.ialm.svd_count <= 30;
  report(1, "ialm at m=500", ok,
         fmt("rank=%ld e_card=%ld rel_error=%.3e svd=%d", (long)final_rank(t.ialm), (long)card, err, t.ialm.svd_count));
}

void criterion_2(const Rpca500& t) {
  const double err = rel_error(t.ealm.A.eigen(), t.inst.a_star.eigen());
  const bool ok = t.ealm.converged && err <= 1e-6 && t.ealm.svd_count <= 45;
  report(2, "ealm at m=500", ok, fmt("rel_error=%.3e svd=%d", err, t.ealm.svd_count));
}

void criterion_3(const Rpca500& t) {
  const bool ok = t.apg.svd_count >= 4 * t.ialm.svd_count;
  report(3, "apg vs ialm svd count", ok,
         fmt("apg=%d ialm=%d ratio=%.2f", t.apg.svd_count, t.ialm.svd_count,
             static_cast<double>(t.apg.svd_count) / t.ialm.svd_count));
}

void criterion_4(const Rpca500& t) {
  const Index apg_card = count_nonzeros(t.apg.E.eigen());
  const Index ialm_card = count_nonzeros(t.ialm.E.eigen());
  const bool ok = apg_card - 12500 >= 20 && std::abs(ialm_card - 12500) <= 5;
  report(4, "apg overestimates support", ok, fmt("apg e_card=%ld ialm e_card=%ld", (long)apg_card, (long)ialm_card));
}

void criterion_5() {
  const McInstance inst = gen_mc(1000, 10, 6 * degrees_of_freedom(1000, 10), 1);
  const McResult r = solve_mc_ialm(inst.omega, inst.d_values);
  const double err = rel_error(r.A.materialize(), inst.a_star.eigen());
  const bool ok = r.converged && err <= 5e-6 && r.A.rank() == 10 && r.iterations <= 110;
  report(5, "mc-ialm at m=1000", ok,
         fmt("p=%zu rel_error=%.3e rank=%ld iter=%d", inst.omega.size(), err, (long)r.A.rank(), r.iterations));
}

double l1_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w, double eps) {
  return eps * x.cwiseAbs().sum() + 0.5 * (x - w).squaredNorm();
}

double nuclear_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w, double eps) {
  return eps * singular_values(x).sum() + 0.5 * (x - w).squaredNorm();
}

void criterion_6() {
  CounterRng rng(6, 0);
  auto gaussian = [&](Index r, Index c, double s) {
    Eigen::MatrixXd m(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) m(i, j) = s * rng.next_gaussian();
    return m;
  };
  const double margin = 1e-10;
  int bad_perturb = 0, bad_subgrad = 0;
  double worst_subgrad = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = trial % 2 == 0 ? 5 : 6;
    const Eigen::MatrixXd w = gaussian(n, n, 2.0);
    const double eps = 0.2 + 2.0 * rng.next_unit();

    const Eigen::MatrixXd xs = shrink(w, eps);
    const SvtFactors f = svt_factors(w, eps, n);
    const Eigen::MatrixXd xn = f.materialize();
    const double fs = l1_objective(xs, w, eps);
    const double fn = nuclear_objective(xn, w, eps);
    for (int p = 0; p < 200; ++p) {
      const double scale = std::pow(10.0, -4.0 + 4.0 * rng.next_unit());
      const Eigen::MatrixXd delta = gaussian(n, n, scale);
      if (l1_objective(xs + delta, w, eps) < fs - margin) ++bad_perturb;
      if (nuclear_objective(xn + delta, w, eps) < fn - margin) ++bad_perturb;
    }

    // shrink: (w - x) / eps is sign(x) where x != 0 and within [-1, 1] elsewhere.
    for (Index i = 0; i < w.size(); ++i) {
      const double g = (w(i) - xs(i)) / eps;
      const double dev = xs(i) != 0.0 ? std::abs(g - (xs(i) > 0 ? 1.0 : -1.0)) : std::max(0.0, std::abs(g) - 1.0);
      worst_subgrad = std::max(worst_subgrad, dev);
      if (dev > margin) ++bad_subgrad;
    }
    // svt: (w - x) / eps = U V^T + P with U^T P = 0, P V = 0, ||P||_2 <= 1.
    const Eigen::MatrixXd g = (w - xn) / eps;
    const Eigen::MatrixXd p = g - f.U * f.V.transpose();
    double dev = std::max((f.U.transpose() * p).cwiseAbs().maxCoeff(), (p * f.V).cwiseAbs().maxCoeff());
    if (f.svp == 0) dev = 0.0;
    dev = std::max(dev, std::max(0.0, singular_values(p)(0) - 1.0));
    worst_subgrad = std::max(worst_subgrad, dev);
    if (dev > margin) ++bad_subgrad;
  }
  report(6, "prox oracles", bad_perturb == 0 && bad_subgrad == 0,
         fmt("50 inputs x 200 perturbations: %d beaten, %d subgradient violations (worst %.1e)", bad_perturb,
             bad_subgrad, worst_subgrad));
}

void criterion_7() {
  double worst_spec = 0.0, worst_linf = 0.0;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RpcaInstance inst = gen_rpca(50, 3, 0.05, seed);
    RpcaConfig cfg;
    cfg.lambda = inst.lambda;
    cfg.eps2 = 1e-7;
    const SolveResult r = solve_ialm(inst.d, cfg);
    const DualFeasibility f = dual_feasibility(r.Y, inst.lambda);
    worst_spec = std::max(worst_spec, f.spectral);
    worst_linf = std::max(worst_linf, f.scaled_linf);
    ok = ok && r.converged && f.ok;
  }
  report(7, "dual feasibility", ok, fmt("10 instances 50x50: max ||Y||_2=%.6f max ||Y||_inf/lambda=%.6f", worst_spec,
                                        worst_linf));
}

void criterion_8() {
  bool ok = true;
  double worst = 0.0;
  std::size_t steps = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const RpcaInstance inst = gen_rpca(20, 2, 0.05, seed);
    RpcaConfig tight;
    tight.lambda = inst.lambda;
    tight.eps1 = 1e-10;
    tight.inner_tol = 1e-10;
    tight.max_inner_iter = 1000;
    const SolveResult oracle = solve_ealm(inst.d, tight);

    std::vector<LyapunovState> states;
    IalmOptions opts;
    opts.observer = [&](const IterationSnapshot& s) { states.push_back({s.A, s.Y, s.mu_next}); };
    RpcaConfig cfg;
    cfg.lambda = inst.lambda;
    const SolveResult r = solve_ialm(inst.d, cfg, opts);
    const std::vector<double> v = lyapunov_trace(states, oracle.A.eigen(), oracle.Y);
    const MonotonicityCheck c = check_nonincreasing(v, 1e-8);
    worst = std::max(worst, c.worst_increase / v.front());
    steps += v.size();
    ok = ok && oracle.converged && r.converged && c.ok;
  }
  report(8, "lyapunov monotonicity", ok,
         fmt("5 instances 20x20, %zu iterates: worst relative increase %.2e", steps, worst));
}

void criterion_9() {
  const RpcaInstance inst = gen_rpca(30, 3, 0.02, 2);
  const DivergenceOutcome bad = divergence_demo(inst, 1e3, 10.0);
  RpcaConfig cfg;
  cfg.lambda = inst.lambda;
  const SolveResult standard = solve_ialm(inst.d, cfg);
  const double err = rel_error(standard.A.eigen(), inst.a_star.eigen());
  report(9, "divergence demonstration", bad.stalled && bad.final_error > 1e-2 && err < 1e-6,
         fmt("m=30 r=3 frac=0.02 seed=2 scale=1e3 growth=10: demo error %.2e, standard error %.2e", bad.final_error,
             err));
}

void criterion_10() {
  const McInstance inst = gen_mc(50, 2, 5 * degrees_of_freedom(50, 2), 11);
  Eigen::MatrixXd a_prev = Eigen::MatrixXd::Zero(50, 50);
  double off_omega_y = 0.0, worst_rel = 0.0;
  int iters = 0;
  solve_mc_ialm(inst.omega, inst.d_values, {}, [&](const McSnapshot& s) {
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(50, 50);
    Eigen::MatrixXd mask = Eigen::MatrixXd::Ones(50, 50);
    for (std::size_t k = 0; k < inst.omega.size(); ++k) {
      y(inst.omega[k].row, inst.omega[k].col) = s.y_omega[k];
      mask(inst.omega[k].row, inst.omega[k].col) = 0.0;
    }
    off_omega_y = std::max(off_omega_y, y.cwiseProduct(mask).cwiseAbs().maxCoeff());
    // E_k = -A_k off omega and 0 on it.
    const Eigen::MatrixXd a = s.A.materialize();
    const double dense = (a - a_prev).cwiseProduct(mask).norm();
    if (dense > 0.0) worst_rel = std::max(worst_rel, std::abs(s.delta_e_norm - dense) / dense);
    a_prev = a;
    ++iters;
  });
  report(10, "mc identities", off_omega_y == 0.0 && worst_rel <= 1e-8,
         fmt("%d iterations: max |Y| off omega %.1e, factored dE relative gap %.2e", iters, off_omega_y, worst_rel));
}

}  // namespace

int main() {
  {
    const Rpca500 t;
    criterion_1(t);
    criterion_2(t);
    criterion_3(t);
    criterion_4(t);
  }
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
