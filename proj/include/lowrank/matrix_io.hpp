#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lowrank/dense_matrix.hpp"

namespace lowrank::io {

/// Observed entries of a partially known matrix, aligned with `omega`.
struct SparseSamples {
  ObservedSet omega;
  std::vector<double> values;
};

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// One row per line, comma separated, no header.
void write_csv(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_csv(std::istream& in);

/// "%%MatrixMarket matrix array real general", column-major values.
void write_matrix_market_array(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_matrix_market_array(std::istream& in);

/// "%%MatrixMarket matrix coordinate real general", 1-based indices on the wire.
void write_matrix_market_coordinate(std::ostream& out, const SparseSamples& samples);
SparseSamples read_matrix_market_coordinate(std::istream& in);

/// Dispatch on extension: ".csv" is CSV, anything else Matrix Market. A
/// Matrix Market coordinate file read as dense fills unlisted entries with 0.
DenseMatrix read_dense(const std::filesystem::path& path);
void write_dense(const std::filesystem::path& path, const DenseMatrix& m);

SparseSamples read_samples(const std::filesystem::path& path);
void write_samples(const std::filesystem::path& path, const SparseSamples& samples);

}  // namespace lowrank::io
