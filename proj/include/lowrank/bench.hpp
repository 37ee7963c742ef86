#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lowrank/dense_matrix.hpp"

namespace lowrank {

/// One benchmark cell: an instance setting paired with an algorithm.
struct BenchCell {
  int table = 1;
  Index m = 0;
  Index r = 0;
  std::string setting;  // e.g. "r=0.05m;E=0.05m^2" or "p/d_r=6"
  double corruption_frac = 0.0;  // tables 1 and 2
  Index p = 0;                   // table 3
  std::string algorithm;
};

struct BenchRow {
  int table = 1;
  Index m = 0;
  Index r = 0;
  std::string setting;
  std::string algorithm;
  double rel_error = 0.0;
  Index rank = 0;
  std::optional<Index> e_card;  // RPCA only
  int iter = 0;
  int svd_count = 0;
  double wall_time_seconds = 0.0;
};

/// Algorithms each table accepts, in output order.
std::vector<std::string> bench_algorithms(int table);

/// Cells in output order: scale, then setting, then algorithm. Tables 1 and
/// 2 use m = scale; table 3 rescales the m = 1000 settings to m = scale.
/// Throws InvalidArgument for an unknown table, algorithm or scale.
std::vector<BenchCell> bench_cells(int table, std::span<const Index> scales, std::span<const std::string> algorithms);

/// Generates the cell's instance from seed and times the solve alone.
BenchRow run_bench_cell(const BenchCell& cell, std::uint64_t seed);

/// Runs every cell on up to `workers` threads; rows come back in cell order.
std::vector<BenchRow> run_bench(const std::vector<BenchCell>& cells, std::uint64_t seed, unsigned workers);

/// Worker slots: hardware concurrency, capped by LOWRANK_THREADS when set to
/// a positive integer.
unsigned bench_worker_slots();

inline constexpr int kBenchSchemaVersion = 1;

/// "# lowrank-bench schema N" comment, the header row, then one row per cell.
void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

}  // namespace lowrank
