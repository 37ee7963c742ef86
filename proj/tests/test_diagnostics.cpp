#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"

#include "lowrank/diagnostics.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/mc.hpp"
#include "lowrank/operators.hpp"
#include "lowrank/problem_gen.hpp"
#include "lowrank/rpca.hpp"
#include "test_support.hpp"

using namespace lowrank;

namespace {

// EALM run that stands in for the exact optimum.
SolveResult tight_ealm(const RpcaInstance& inst) {
  RpcaConfig cfg;
  cfg.lambda = inst.lambda;
  cfg.eps1 = 1e-10;
  cfg.inner_tol = 1e-10;
  cfg.max_inner_iter = 1000;
  return solve_ealm(inst.d, cfg);
}

}  // namespace

TEST_CASE("kkt_report") {
  const RpcaInstance inst = gen_rpca(20, 2, 0.05, 1);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Zero(20, 20);
  const KktReport exact = kkt_report(inst.d.eigen(), inst.a_star.eigen(), inst.e_star.eigen(), y, inst.lambda, 1.0, 0.0);
  CHECK(exact.feas == 0.0);
  CHECK(exact.objective > 0.0);
  CHECK_THROWS_AS(kkt_report(inst.d.eigen(), Eigen::MatrixXd::Zero(3, 3), inst.e_star.eigen(), y, inst.lambda, 1.0, 0.0),
                  InvalidArgument);
  CHECK_THROWS_AS(kkt_report(inst.d.eigen(), inst.a_star.eigen(), inst.e_star.eigen(), y, 0.0, 1.0, 0.0),
                  InvalidArgument);
}

TEST_CASE("feasibility decreases across a mid-run 20x20 trace") {
  const RpcaInstance inst = gen_rpca(20, 2, 0.05, 1);
  std::vector<double> feas;
  IalmOptions opts;
  opts.observer = [&](const IterationSnapshot& s) {
    if (s.iter == 0) return;
    const KktReport k = kkt_report(inst.d.eigen(), s.A, s.E, s.Y, inst.lambda, s.mu_used, 0.0);
    feas.push_back(k.feas);
  };
  RpcaConfig cfg;
  cfg.max_iter = 20;
  const SolveResult r = solve_ialm(inst.d, cfg, opts);
  REQUIRE(feas.size() == 20);
  for (std::size_t k = feas.size() - 5; k < feas.size(); ++k) {
    CHECK(feas[k] > 0.0);
    if (k > feas.size() - 5) CHECK(feas[k] < feas[k - 1]);
  }
  CHECK(feas.back() == doctest::Approx(r.trace.back().feas).epsilon(1e-12));
}

TEST_CASE("dual_feasibility") {
  const DualFeasibility zero = dual_feasibility(Eigen::MatrixXd::Zero(4, 4), 0.5);
  CHECK(zero.ok);
  CHECK(zero.spectral == 0.0);
  CHECK(zero.scaled_linf == 0.0);
  CHECK_FALSE(dual_feasibility(10.0 * Eigen::MatrixXd::Identity(4, 4), 1.0).ok);

  const RpcaInstance inst = gen_rpca(50, 3, 0.05, 1);
  const SolveResult r = solve_ialm(inst.d);
  const DualFeasibility f = dual_feasibility(r.Y, inst.lambda);
  CHECK(std::abs(f.spectral - 1.0) <= 1e-2);
  CHECK(std::abs(f.scaled_linf - 1.0) <= 1e-2);
}

TEST_CASE("dual_estimate lies in the nuclear norm subdifferential") {
  const RpcaInstance inst = gen_rpca(20, 2, 0.05, 3);
  Eigen::MatrixXd e_prev, y_prev;
  double mu_prev = 0.0;
  double worst = 0.0;
  IalmOptions opts;
  opts.order = UpdateOrder::e_first;
  opts.observer = [&](const IterationSnapshot& s) {
    if (s.iter > 0) {
      // Y_hat from the A-step input is Y_prev + mu (D - A - E_new).
      const Eigen::MatrixXd y_hat = dual_estimate(inst.d.eigen(), s.A, s.E, y_prev, mu_prev);
      worst = std::max(worst, singular_values(y_hat)(0));
    }
    e_prev = s.E;
    y_prev = s.Y;
    mu_prev = s.mu_next;
  };
  solve_ialm(inst.d, {}, opts);
  CHECK(worst <= 1.0 + 1e-9);
}

TEST_CASE("lyapunov_trace") {
  const Eigen::MatrixXd x = lowrank::testing::gaussian(5, 5, 1);
  const Eigen::MatrixXd y = lowrank::testing::gaussian(5, 5, 2);
  const std::vector<LyapunovState> at_opt(4, LyapunovState{x, y, 2.0});
  for (double v : lyapunov_trace(at_opt, x, y)) CHECK(v == 0.0);
  CHECK_THROWS_AS(lyapunov_trace(at_opt, std::nullopt, y), InvalidArgument);
  CHECK_THROWS_AS(lyapunov_trace(at_opt, x, std::nullopt), InvalidArgument);

  std::vector<LyapunovState> path;
  for (int k = 0; k < 5; ++k) path.push_back({x + std::pow(0.5, k) * y, y, 1.0});
  const std::vector<double> v = lyapunov_trace(path, x, y);
  CHECK(v[0] == doctest::Approx(y.squaredNorm()));
  CHECK(check_nonincreasing(v).ok);
  std::swap(path[1], path[3]);
  const MonotonicityCheck swapped = check_nonincreasing(lyapunov_trace(path, x, y));
  CHECK_FALSE(swapped.ok);
  CHECK(swapped.first_violation == 2);
  CHECK(swapped.worst_increase > 0.0);
}

TEST_CASE("lyapunov quantity of ialm against an ealm oracle") {
  const RpcaInstance inst = gen_rpca(20, 2, 0.05, 1);
  const SolveResult oracle = tight_ealm(inst);
  REQUIRE(oracle.converged);
  std::vector<LyapunovState> states;
  IalmOptions opts;
  opts.observer = [&](const IterationSnapshot& s) { states.push_back({s.A, s.Y, s.mu_next}); };
  solve_ialm(inst.d, {}, opts);
  const MonotonicityCheck c =
      check_nonincreasing(lyapunov_trace(states, oracle.A.eigen(), oracle.Y), 1e-8);
  CHECK(c.ok);
}

TEST_CASE("objective sandwich along ealm iterates") {
  const RpcaInstance inst = gen_rpca(20, 2, 0.05, 2);
  const SolveResult oracle = tight_ealm(inst);
  const double f_star = norms(oracle.A).nuclear + inst.lambda * oracle.E.eigen().cwiseAbs().sum();
  std::vector<double> objs, mus;
  // The bound is for exact subproblem solutions.
  RpcaConfig cfg;
  cfg.lambda = inst.lambda;
  cfg.inner_tol = 1e-10;
  cfg.max_inner_iter = 1000;
  solve_ealm(inst.d, cfg, [&](const IterationSnapshot& s) {
    if (s.iter == 0) return;
    objs.push_back(s.nuclear_norm_a + inst.lambda * s.E.cwiseAbs().sum());
    mus.push_back(s.mu_used);
  });
  REQUIRE(objs.size() > 3);
  const SandwichCheck c = check_objective_sandwich(objs, mus, f_star);
  CHECK(c.ok);
  CHECK(c.c > 0.0);

  std::vector<double> broken = objs;
  broken.back() = f_star + 10.0;
  CHECK_FALSE(check_objective_sandwich(broken, mus, f_star).ok);
}

TEST_CASE("divergence demo") {
  const RpcaInstance inst = gen_rpca(30, 3, 0.02, 2);
  const DivergenceOutcome bad = divergence_demo(inst, 1e3, 10.0);
  CHECK(bad.stalled);
  CHECK(bad.final_error > 1e-2);
  DivergenceOptions control;
  control.bad_e0_scale = 0.0;
  control.mu_cap = 10.0 * 1.25 / singular_values(inst.d.eigen())(0);
  control.max_iter = 1000;
  CHECK_FALSE(divergence_demo(inst, control).stalled);
}

TEST_CASE("mc dual estimate overestimates the subdifferential distance") {
  const McInstance inst = gen_mc(30, 2, 500, 4);
  Eigen::MatrixXd a_prev = Eigen::MatrixXd::Zero(30, 30);
  int checked = 0;
  int held = 0;
  solve_mc_ialm(inst.omega, inst.d_values, {}, [&](const McSnapshot& s) {
    const Eigen::MatrixXd a = s.A.materialize();
    // Y_hat = Y_k + mu (D - A_{k+1} - E_k): Y_{k+1} on omega, mu (A_k - A_{k+1}) off it.
    Eigen::MatrixXd y_hat = s.mu_used * (a_prev - a);
    for (std::size_t k = 0; k < inst.omega.size(); ++k) y_hat(inst.omega[k].row, inst.omega[k].col) = s.y_omega[k];
    const double truth = mc_dual_distance(y_hat, a, inst.omega);
    const double surrogate = s.mu_used * s.delta_e_norm;
    ++checked;
    if (surrogate >= truth * (1.0 - 1e-8)) ++held;
    a_prev = a;
  });
  CHECK(checked > 0);
  CHECK(held == checked);
}
