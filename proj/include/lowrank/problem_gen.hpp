#pragma once

#include <cstdint>
#include <vector>

#include "lowrank/dense_matrix.hpp"

namespace lowrank {

/// Synthetic robust-PCA problem D = A* + E*.
struct RpcaInstance {
  DenseMatrix a_star;
  DenseMatrix e_star;
  DenseMatrix d;
  Index r = 0;
  Index e_card = 0;
  std::uint64_t seed = 0;
  /// Default sparsity weight m^{-1/2}.
  double lambda = 0.0;
};

/// Synthetic matrix-completion problem: p samples of a rank-r matrix.
struct McInstance {
  DenseMatrix a_star;
  ObservedSet omega;
  std::vector<double> d_values;
  Index r = 0;
  Index d_r = 0;  // r (2m - r) degrees of freedom
  std::uint64_t seed = 0;
};

/// Draw streams under one seed.
enum class GenStream : std::uint64_t {
  left_factor = 0,
  right_factor = 1,
  support = 2,
  error_values = 3,
};

/// m x r standard-normal factors L, R drawn row-major from their streams;
/// returns L R^T.
Eigen::MatrixXd random_low_rank(Index m, Index r, std::uint64_t seed);

/// First `count` draws of a partial Fisher-Yates shuffle of [0, n),
/// in draw order. Memory is O(count).
std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t count, std::uint64_t seed,
                                                      GenStream stream);

/// A* = L R^T with Gaussian factors; E* supported on exactly
/// round(corruption_frac * m^2) uniformly chosen entries, values uniform on
/// [-500, 500]. Requires 0 <= r <= m and corruption_frac in [0, 1).
RpcaInstance gen_rpca(Index m, Index r, double corruption_frac, std::uint64_t seed);

/// A* as in gen_rpca; Omega a uniform p-subset of the m^2 entries.
McInstance gen_mc(Index m, Index r, Index p, std::uint64_t seed);

/// r (2m - r)
Index degrees_of_freedom(Index m, Index r);

}  // namespace lowrank
