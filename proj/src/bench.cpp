#include "lowrank/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "lowrank/errors.hpp"
#include "lowrank/matrix_io.hpp"
#include "lowrank/mc.hpp"
#include "lowrank/operators.hpp"
#include "lowrank/problem_gen.hpp"
#include "lowrank/rpca.hpp"

namespace lowrank {

namespace {

struct RpcaSetting {
  double rank_frac;
  double corruption_frac;
  const char* label;
};

constexpr RpcaSetting kTable1[] = {{0.05, 0.05, "r=0.05m;E=0.05m^2"}, {0.05, 0.10, "r=0.05m;E=0.10m^2"}};
constexpr RpcaSetting kTable2[] = {{0.10, 0.05, "r=0.10m;E=0.05m^2"}, {0.10, 0.10, "r=0.10m;E=0.10m^2"}};

struct McSetting {
  Index r_at_1000;
  int ratio;  // p / d_r
};

constexpr McSetting kTable3[] = {{10, 6}, {50, 4}, {100, 3}};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<std::string> bench_algorithms(int table) {
  if (table == 1 || table == 2) return {"apg", "ealm", "ialm", "it"};
  if (table == 3) return {"ialm"};
  throw InvalidArgument("bench: table must be 1, 2 or 3, got " + std::to_string(table));
}

std::vector<BenchCell> bench_cells(int table, std::span<const Index> scales, std::span<const std::string> algorithms) {
  const std::vector<std::string> known = bench_algorithms(table);
  for (const auto& a : algorithms)
    if (std::find(known.begin(), known.end(), a) == known.end())
      throw InvalidArgument("bench: algorithm '" + a + "' is not available for table " + std::to_string(table));
  // Output order follows the table's algorithm order, not the order given.
  std::vector<std::string> algs;
  for (const auto& a : known)
    if (std::find(algorithms.begin(), algorithms.end(), a) != algorithms.end()) algs.push_back(a);
  if (algs.empty()) throw InvalidArgument("bench: no algorithms selected");

  std::vector<Index> sorted(scales.begin(), scales.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.empty()) throw InvalidArgument("bench: no scales given");

  std::vector<BenchCell> cells;
  for (const Index m : sorted) {
    if (m < 2) throw InvalidArgument("bench: scale must be at least 2, got " + std::to_string(m));
    if (table == 3) {
      for (const auto& s : kTable3) {
        const Index r = std::max<Index>(1, round_half_up(static_cast<double>(s.r_at_1000) * static_cast<double>(m) / 1000.0));
        const Index p = std::min<Index>(s.ratio * degrees_of_freedom(m, r), m * m);
        for (const auto& a : algs)
          cells.push_back({3, m, r, "p/d_r=" + std::to_string(s.ratio), 0.0, p, a});
      }
    } else {
      for (const auto& s : table == 1 ? std::span(kTable1) : std::span(kTable2)) {
        const Index r = std::max<Index>(1, round_half_up(s.rank_frac * static_cast<double>(m)));
        for (const auto& a : algs) cells.push_back({table, m, r, s.label, s.corruption_frac, 0, a});
      }
    }
  }
  return cells;
}

BenchRow run_bench_cell(const BenchCell& cell, std::uint64_t seed) {
  BenchRow row{cell.table, cell.m, cell.r, cell.setting, cell.algorithm, 0.0, 0, std::nullopt, 0, 0, 0.0};
  if (cell.table == 3) {
    const McInstance inst = gen_mc(cell.m, cell.r, cell.p, seed);
    const auto t0 = std::chrono::steady_clock::now();
    const McResult res = solve_mc_ialm(inst.omega, inst.d_values);
    row.wall_time_seconds = seconds_since(t0);
    const Eigen::MatrixXd& a_star = inst.a_star.eigen();
    row.rel_error = (res.A.materialize() - a_star).norm() / a_star.norm();
    row.rank = res.A.rank();
    row.iter = res.iterations;
    row.svd_count = res.iterations;
    return row;
  }
  const RpcaInstance inst = gen_rpca(cell.m, cell.r, cell.corruption_frac, seed);
  RpcaConfig cfg;
  cfg.lambda = inst.lambda;
  const auto t0 = std::chrono::steady_clock::now();
  const SolveResult res = solve_rpca(parse_rpca_algorithm(cell.algorithm), inst.d, cfg);
  row.wall_time_seconds = seconds_since(t0);
  const Eigen::MatrixXd& a_star = inst.a_star.eigen();
  row.rel_error = (res.A.eigen() - a_star).norm() / a_star.norm();
  row.rank = res.trace.empty() ? 0 : res.trace.back().rank_a;
  row.e_card = count_nonzeros(res.E.eigen());
  row.iter = res.iterations;
  row.svd_count = res.svd_count;
  return row;
}

std::vector<BenchRow> run_bench(const std::vector<BenchCell>& cells, std::uint64_t seed, unsigned workers) {
  std::vector<BenchRow> rows(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        rows[i] = run_bench_cell(cells[i], seed);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

unsigned bench_worker_slots() {
  unsigned slots = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LOWRANK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) slots = std::min<unsigned>(slots, static_cast<unsigned>(v));
  }
  return slots;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << "# lowrank-bench schema " << kBenchSchemaVersion << '\n'
      << "table,m,r,setting,algorithm,rel_error,rank,e_card,iter,svd_count,wall_time_seconds\n";
  char time_buf[32];
  for (const auto& r : rows) {
    std::snprintf(time_buf, sizeof time_buf, "%.3f", r.wall_time_seconds);
    out << r.table << ',' << r.m << ',' << r.r << ',' << r.setting << ',' << r.algorithm << ','
        << io::format_double(r.rel_error) << ',' << r.rank << ',' << (r.e_card ? std::to_string(*r.e_card) : "")
        << ',' << r.iter << ',' << r.svd_count << ',' << time_buf << '\n';
  }
}

}  // namespace lowrank
