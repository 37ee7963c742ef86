#include <cmath>
#include <vector>

#include "doctest.h"

#include "lowrank/errors.hpp"
#include "lowrank/mc.hpp"
#include "lowrank/operators.hpp"
#include "lowrank/problem_gen.hpp"
#include "test_support.hpp"

using namespace lowrank;
using lowrank::testing::rel_diff;

TEST_CASE("rho_from_density") {
  CHECK(rho_from_density(0.12) == doctest::Approx(1.440256).epsilon(1e-14));
  CHECK(rho_from_density(1.0) == doctest::Approx(3.076).epsilon(1e-14));
  CHECK_THROWS_AS(rho_from_density(0.0), InvalidArgument);
  CHECK_THROWS_AS(rho_from_density(1.5), InvalidArgument);
}

TEST_CASE("truncation and rank prediction") {
  const std::vector<double> flat{10, 9, 8, 7.5};
  CHECK(truncation_rank(4, flat) == 4);
  CHECK(predict_rank_mc(4, 4, flat, 100) == 14);
  CHECK(predict_rank_mc(4, 4, flat, 10) == 10);

  const std::vector<double> gap{10, 9, 0.1, 0.05};
  CHECK(truncation_rank(2, gap) == 2);
  CHECK(predict_rank_mc(2, 4, gap, 100) == 3);
  CHECK(truncation_rank(4, gap) == 2);

  const std::vector<double> zero_tail{5, 4, 0};
  CHECK(truncation_rank(3, zero_tail) == 2);

  CHECK_THROWS_AS(predict_rank_mc(1, 1, std::vector<double>{}, 10), InvalidArgument);
}

TEST_CASE("factored matrix sampling") {
  FactoredMatrix f{lowrank::testing::gaussian(6, 2, 1), lowrank::testing::gaussian(5, 2, 2)};
  const ObservedSet omega = ObservedSet::from_unsorted(6, 5, {{0, 4}, {5, 0}, {2, 2}});
  const std::vector<double> s = f.sample(omega);
  const Eigen::MatrixXd full = f.materialize();
  for (std::size_t k = 0; k < omega.size(); ++k) CHECK(s[k] == doctest::Approx(full(omega[k].row, omega[k].col)));
}

TEST_CASE("input validation") {
  const ObservedSet omega = ObservedSet::from_unsorted(4, 4, {{0, 0}, {1, 1}});
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(solve_mc_ialm(omega, one), InvalidArgument);
  CHECK_THROWS_AS(solve_mc_ialm(ObservedSet(4, 4, {}), std::vector<double>{}), InvalidArgument);
  const std::vector<double> nan{1.0, NAN};
  CHECK_THROWS_AS(solve_mc_ialm(omega, nan), InvalidArgument);
  McConfig bad;
  bad.rho = 0.9;
  CHECK_THROWS_AS(solve_mc_ialm(omega, std::vector<double>{1.0, 2.0}, bad), InvalidArgument);
}

TEST_CASE("zero observations give a zero completion") {
  const ObservedSet omega = ObservedSet::from_unsorted(5, 5, {{0, 0}, {3, 2}});
  const McResult r = solve_mc_ialm(omega, std::vector<double>{0.0, 0.0});
  CHECK(r.converged);
  CHECK(r.A.materialize().norm() == 0.0);
}

TEST_CASE("fully observed matrix is returned") {
  const McInstance inst = gen_mc(40, 3, 1600, 5);
  const McResult r = solve_mc_ialm(inst.omega, inst.d_values);
  CHECK(r.converged);
  CHECK(rel_diff(r.A.materialize(), inst.a_star.eigen()) < 1e-10);
}

TEST_CASE("completion of a 50x50 rank-2 matrix") {
  const McInstance inst = gen_mc(50, 2, 5 * degrees_of_freedom(50, 2), 11);
  int calls = 0;
  bool mu_ok = true;
  double prev_next = 0.0;
  McConfig cfg;
  const McResult r = solve_mc_ialm(inst.omega, inst.d_values, cfg, [&](const McSnapshot& s) {
    if (calls > 0 && s.mu_used != prev_next) mu_ok = false;
    prev_next = s.mu_next;
    ++calls;
  });
  CHECK(r.converged);
  CHECK(calls == r.iterations);
  CHECK(mu_ok);
  CHECK(r.rho == doctest::Approx(rho_from_density(980.0 / 2500.0)));
  CHECK(r.A.rank() == 2);
  CHECK(rel_diff(r.A.materialize(), inst.a_star.eigen()) < 5e-6);
  CHECK(r.y_omega.size() == inst.omega.size());
  CHECK(r.trace.back().feas < cfg.eps1);
}

TEST_CASE("adaptive schedule also converges") {
  const McInstance inst = gen_mc(50, 2, 5 * degrees_of_freedom(50, 2), 11);
  McConfig cfg;
  cfg.schedule = MuSchedule::adaptive;
  const McResult r = solve_mc_ialm(inst.omega, inst.d_values, cfg);
  CHECK(r.converged);
  CHECK(rel_diff(r.A.materialize(), inst.a_star.eigen()) < 1e-5);
  for (std::size_t k = 1; k < r.trace.size(); ++k)
    CHECK((r.trace[k].mu == r.trace[k - 1].mu || r.trace[k].mu == doctest::Approx(r.rho * r.trace[k - 1].mu)));
}

TEST_CASE("off-omega error block is minus the unobserved part of A") {
  const McInstance inst = gen_mc(30, 2, 400, 3);
  double worst = 0.0;
  solve_mc_ialm(inst.omega, inst.d_values, {}, [&](const McSnapshot& s) {
    const Eigen::MatrixXd a = s.A.materialize();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(30, 30), y = d, pa = d;
    for (std::size_t k = 0; k < inst.omega.size(); ++k) {
      d(inst.omega[k].row, inst.omega[k].col) = inst.d_values[k];
      y(inst.omega[k].row, inst.omega[k].col) = s.y_omega[k];
      pa(inst.omega[k].row, inst.omega[k].col) = a(inst.omega[k].row, inst.omega[k].col);
    }
    Eigen::MatrixXd e = d - a + y / s.mu_used;
    for (std::size_t k = 0; k < inst.omega.size(); ++k) e(inst.omega[k].row, inst.omega[k].col) = 0.0;
    worst = std::max(worst, (e - (pa - a)).norm() / std::max(1.0, a.norm()));
  });
  CHECK(worst <= 1e-12);
}
