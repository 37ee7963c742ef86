#include "lowrank/matrix_io.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "lowrank/errors.hpp"

namespace lowrank::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw InvalidArgument("cannot parse number '" + std::string(token) + "'");
  return value;
}

long long parse_integer(std::string_view token) {
  token = trim(token);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw InvalidArgument("cannot parse integer '" + std::string(token) + "'");
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

struct MmHeader {
  std::string format;  // "array" or "coordinate"
  std::string field;   // "real", "integer", ...
  std::string symmetry;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

MmHeader read_banner(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("Matrix Market: empty input");
  const auto tokens = split_ws(line);
  if (tokens.size() != 5 || lower(std::string(tokens[0])) != "%%matrixmarket" || lower(std::string(tokens[1])) != "matrix")
    throw InvalidArgument("Matrix Market: malformed banner '" + line + "'");
  MmHeader h{lower(std::string(tokens[2])), lower(std::string(tokens[3])), lower(std::string(tokens[4]))};
  if (h.format != "array" && h.format != "coordinate")
    throw InvalidArgument("Matrix Market: unsupported format '" + h.format + "'");
  if (h.field != "real" && h.field != "integer" && h.field != "double")
    throw InvalidArgument("Matrix Market: unsupported field '" + h.field + "'");
  if (h.symmetry != "general") throw InvalidArgument("Matrix Market: only 'general' symmetry is supported");
  return h;
}

// Next non-comment, non-blank line.
bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '%') continue;
    return true;
  }
  return false;
}

DenseMatrix array_body(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) throw InvalidArgument("Matrix Market: missing size line");
  const auto size = split_ws(line);
  if (size.size() != 2) throw InvalidArgument("Matrix Market array: size line needs 'rows cols'");
  const Index rows = parse_integer(size[0]);
  const Index cols = parse_integer(size[1]);
  if (rows <= 0 || cols <= 0) throw InvalidArgument("Matrix Market array: dimensions must be positive");
  Eigen::MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      if (!next_data_line(in, line)) throw InvalidArgument("Matrix Market array: too few entries");
      m(i, j) = parse_double(line);
    }
  if (next_data_line(in, line)) throw InvalidArgument("Matrix Market array: trailing data");
  return DenseMatrix(std::move(m));
}

SparseSamples coordinate_body(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) throw InvalidArgument("Matrix Market: missing size line");
  const auto size = split_ws(line);
  if (size.size() != 3) throw InvalidArgument("Matrix Market coordinate: size line needs 'rows cols nnz'");
  const Index rows = parse_integer(size[0]);
  const Index cols = parse_integer(size[1]);
  const long long nnz = parse_integer(size[2]);
  if (rows <= 0 || cols <= 0 || nnz < 0) throw InvalidArgument("Matrix Market coordinate: bad size line");

  std::vector<std::pair<ObservedSet::Entry, double>> entries;
  entries.reserve(static_cast<std::size_t>(nnz));
  for (long long k = 0; k < nnz; ++k) {
    if (!next_data_line(in, line)) throw InvalidArgument("Matrix Market coordinate: too few entries");
    const auto tok = split_ws(line);
    if (tok.size() != 3) throw InvalidArgument("Matrix Market coordinate: entry needs 'i j value'");
    entries.push_back({{parse_integer(tok[0]) - 1, parse_integer(tok[1]) - 1}, parse_double(tok[2])});
  }
  if (next_data_line(in, line)) throw InvalidArgument("Matrix Market coordinate: trailing data");

  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseSamples out;
  std::vector<ObservedSet::Entry> idx;
  idx.reserve(entries.size());
  out.values.reserve(entries.size());
  for (const auto& [e, v] : entries) {
    if (!std::isfinite(v)) throw InvalidArgument("Matrix Market coordinate: non-finite value");
    idx.push_back(e);
    out.values.push_back(v);
  }
  out.omega = ObservedSet(rows, cols, std::move(idx));
  return out;
}

bool is_csv(const std::filesystem::path& path) { return lower(path.extension().string()) == ".csv"; }

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw InvalidArgument("cannot format number");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const DenseMatrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

DenseMatrix read_csv(std::istream& in) {
  std::vector<double> entries;
  Index rows = 0;
  Index cols = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    Index count = 0;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      entries.push_back(parse_double(rest.substr(0, comma)));
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols >= 0 && count != cols)
      throw InvalidArgument("CSV row " + std::to_string(rows + 1) + " has " + std::to_string(count) +
                            " fields, expected " + std::to_string(cols));
    cols = count;
    ++rows;
  }
  if (rows == 0) throw InvalidArgument("CSV input is empty");
  return DenseMatrix::from_row_major(rows, cols, entries);
}

void write_matrix_market_array(std::ostream& out, const DenseMatrix& m) {
  out << "%%MatrixMarket matrix array real general\n" << m.rows() << ' ' << m.cols() << '\n';
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out << format_double(m(i, j)) << '\n';
}

DenseMatrix read_matrix_market_array(std::istream& in) {
  const MmHeader h = read_banner(in);
  if (h.format != "array") throw InvalidArgument("Matrix Market: expected array format");
  return array_body(in);
}

void write_matrix_market_coordinate(std::ostream& out, const SparseSamples& samples) {
  if (samples.values.size() != samples.omega.size())
    throw InvalidArgument("sample values do not match the observed index count");
  out << "%%MatrixMarket matrix coordinate real general\n"
      << samples.omega.rows() << ' ' << samples.omega.cols() << ' ' << samples.omega.size() << '\n';
  for (std::size_t k = 0; k < samples.omega.size(); ++k) {
    const auto& e = samples.omega[k];
    out << e.row + 1 << ' ' << e.col + 1 << ' ' << format_double(samples.values[k]) << '\n';
  }
}

SparseSamples read_matrix_market_coordinate(std::istream& in) {
  const MmHeader h = read_banner(in);
  if (h.format != "coordinate") throw InvalidArgument("Matrix Market: expected coordinate format");
  return coordinate_body(in);
}

DenseMatrix read_dense(const std::filesystem::path& path) {
  auto in = open_in(path);
  if (is_csv(path)) return read_csv(in);
  const MmHeader h = read_banner(in);
  if (h.format == "array") return array_body(in);
  const SparseSamples s = coordinate_body(in);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(s.omega.rows(), s.omega.cols());
  for (std::size_t k = 0; k < s.omega.size(); ++k) m(s.omega[k].row, s.omega[k].col) = s.values[k];
  return DenseMatrix(std::move(m));
}

void write_dense(const std::filesystem::path& path, const DenseMatrix& m) {
  auto out = open_out(path);
  if (is_csv(path))
    write_csv(out, m);
  else
    write_matrix_market_array(out, m);
  if (!out) throw InvalidArgument("failed writing '" + path.string() + "'");
}

SparseSamples read_samples(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_market_coordinate(in);
}

void write_samples(const std::filesystem::path& path, const SparseSamples& samples) {
  auto out = open_out(path);
  write_matrix_market_coordinate(out, samples);
  if (!out) throw InvalidArgument("failed writing '" + path.string() + "'");
}

}  // namespace lowrank::io
