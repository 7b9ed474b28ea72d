#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "chevetlab/common.hpp"

namespace chevetlab {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr int kMaxNetDim = 64;

/// Level i of the sparse net hierarchy. The net is the lattice
///   M_i = { pitch * v : v in Z^n, |supp v| <= 2^i, |v_j| <= max_units,
///           sum v_j^2 <= max_square_units },
/// which lies in B_2 and 2^(-i/2) B_inf and covers every vector of the cap
/// (support <= 2^i inside B_2 and 2^(-i/2) B_inf) within epsilon, since
/// coordinatewise rounding moves each coordinate by less than pitch.
struct NetLevel {
  int i = 0;
  int support = 1;  // 2^i
  double epsilon = 0.0;  // 2^i / (4k)
  double pitch = 0.0;    // epsilon / 2^(i/2)
  int max_units = 0;
  std::int64_t max_square_units = 0;
  BigInt cardinality;
  BigInt binomial_bound;  // C(n, 2^i) * (12k / 2^i)^(2^i), rounded up to an integer
  bool within_bound = false;  // exact comparison against the unrounded bound
  double c_hat = 0.0;         // ln(cardinality) / (2^i ln(2n / 2^i))
};

/// A point of a net in sparse form: sorted (index, value) pairs, 0-based.
using SparsePoint = std::vector<std::pair<int, double>>;

struct NetHierarchy {
  int n = 0;
  int k = 0;  // 2^r - 1
  int r = 0;
  std::vector<NetLevel> levels;

  /// All points of level i; throws BudgetExceeded above `limit` points.
  std::vector<SparsePoint> points(int i, std::uint64_t limit = 1'000'000) const;
};

/// Certified net hierarchy for k-sparse unit vectors in R^n. Cardinalities
/// are counted exactly; points are produced on demand.
NetHierarchy build_level_net(int n, int k);

/// {n, k, levels:[{i, epsilon, points:[[[idx, val], ...], ...]}]} with 1-based
/// indices. Throws BudgetExceeded when a level has more than `limit` points.
nlohmann::json net_to_json(const NetHierarchy& h, std::uint64_t limit = 100'000);

struct SparseDecomposition {
  Vector target;
  std::vector<Vector> pieces;  // pieces[i] in M_i
  Vector approximation;
  double error = 0.0;  // |target - approximation|
};

/// Sorts supp x by magnitude and hands ranks [2^i - 1, 2^(i+1) - 1) to level i,
/// rounding each block to the nearest point of M_i.
SparseDecomposition decompose_sparse(const Vector& x, const NetHierarchy& h);

/// A point of M_i within epsilon of y, where y lies in the level-i cap:
/// coordinatewise nearest lattice values, truncated toward zero when the
/// nearest values leave the Euclidean ball.
Vector round_to_level(const Vector& y, const NetLevel& level);

}  // namespace chevetlab
