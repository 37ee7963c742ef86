#include "lowrank/problem_gen.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "lowrank/errors.hpp"
#include "lowrank/random.hpp"
#include "lowrank/rpca.hpp"

namespace lowrank {

namespace {

void require_sizes(Index m, Index r) {
  if (m <= 0) throw InvalidArgument("generator: m must be positive");
  if (r < 0 || r > m)
    throw InvalidArgument("generator: rank r = " + std::to_string(r) + " must lie in [0, m = " + std::to_string(m) + "]");
}

Eigen::MatrixXd gaussian_factor(Index m, Index r, std::uint64_t seed, GenStream stream) {
  CounterRng rng(seed, static_cast<std::uint64_t>(stream));
  Eigen::MatrixXd f(m, r);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < r; ++j) f(i, j) = rng.next_gaussian();
  return f;
}

}  // namespace

Index degrees_of_freedom(Index m, Index r) { return r * (2 * m - r); }

Eigen::MatrixXd random_low_rank(Index m, Index r, std::uint64_t seed) {
  require_sizes(m, r);
  if (r == 0) return Eigen::MatrixXd::Zero(m, m);
  const Eigen::MatrixXd L = gaussian_factor(m, r, seed, GenStream::left_factor);
  const Eigen::MatrixXd R = gaussian_factor(m, r, seed, GenStream::right_factor);
  return L * R.transpose();
}

std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t count, std::uint64_t seed,
                                                      GenStream stream) {
  if (count > n) throw InvalidArgument("cannot draw " + std::to_string(count) + " of " + std::to_string(n) + " items");
  CounterRng rng(seed, static_cast<std::uint64_t>(stream));
  // Sparse view of the permutation array: only displaced slots are stored.
  std::unordered_map<std::uint64_t, std::uint64_t> displaced;
  displaced.reserve(static_cast<std::size_t>(count) * 2);
  auto at = [&](std::uint64_t i) {
    const auto it = displaced.find(i);
    return it == displaced.end() ? i : it->second;
  };
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t j = i + rng.next_below(n - i);
    const std::uint64_t picked = at(j);
    displaced[j] = at(i);
    out.push_back(picked);
  }
  return out;
}

RpcaInstance gen_rpca(Index m, Index r, double corruption_frac, std::uint64_t seed) {
  require_sizes(m, r);
  if (!(corruption_frac >= 0.0 && corruption_frac < 1.0))
    throw InvalidArgument("gen_rpca: corruption fraction must lie in [0, 1)");

  const auto total = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(m);
  const auto e_card = static_cast<std::uint64_t>(round_half_up(corruption_frac * static_cast<double>(total)));

  Eigen::MatrixXd a = random_low_rank(m, r, seed);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m, m);
  CounterRng values(seed, static_cast<std::uint64_t>(GenStream::error_values));
  for (const std::uint64_t lin : sample_without_replacement(total, e_card, seed, GenStream::support)) {
    double v = 0.0;
    while (v == 0.0) v = values.next_uniform(-500.0, 500.0);
    e(static_cast<Index>(lin / static_cast<std::uint64_t>(m)), static_cast<Index>(lin % static_cast<std::uint64_t>(m))) = v;
  }

  RpcaInstance inst;
  inst.d = DenseMatrix(a + e);
  inst.a_star = DenseMatrix(std::move(a));
  inst.e_star = DenseMatrix(std::move(e));
  inst.r = r;
  inst.e_card = static_cast<Index>(e_card);
  inst.seed = seed;
  inst.lambda = 1.0 / std::sqrt(static_cast<double>(m));
  return inst;
}

McInstance gen_mc(Index m, Index r, Index p, std::uint64_t seed) {
  require_sizes(m, r);
  const auto total = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(m);
  if (p < 0 || static_cast<std::uint64_t>(p) > total)
    throw InvalidArgument("gen_mc: sample count p = " + std::to_string(p) + " must lie in [0, m^2]");

  McInstance inst;
  inst.a_star = DenseMatrix(random_low_rank(m, r, seed));
  std::vector<ObservedSet::Entry> idx;
  idx.reserve(static_cast<std::size_t>(p));
  for (const std::uint64_t lin : sample_without_replacement(total, static_cast<std::uint64_t>(p), seed, GenStream::support))
    idx.push_back({static_cast<Index>(lin / static_cast<std::uint64_t>(m)), static_cast<Index>(lin % static_cast<std::uint64_t>(m))});
  inst.omega = ObservedSet::from_unsorted(m, m, std::move(idx));
  inst.d_values.reserve(inst.omega.size());
  for (const auto& e : inst.omega.indices()) inst.d_values.push_back(inst.a_star(e.row, e.col));
  inst.r = r;
  inst.d_r = degrees_of_freedom(m, r);
  inst.seed = seed;
  return inst;
}

}  // namespace lowrank
