#include "chevetlab/nets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

#include "chevetlab/submatrix.hpp"

namespace chevetlab {

namespace {

BigInt big_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc *= n - k + i;
    acc /= i;
  }
  return acc;
}

/// Number of v in Z^n with at most `support` nonzeros, |v_j| <= units and
/// sum v_j^2 <= square_units.
BigInt count_lattice(int n, int support, int units, std::int64_t square_units) {
  const auto Q = static_cast<std::size_t>(square_units);
  // ways[q]: ordered tuples of t nonzero values with squared sum exactly q.
  std::vector<BigInt> ways(Q + 1, 0);
  ways[0] = 1;
  BigInt total = 1;  // the zero vector
  for (int t = 1; t <= support; ++t) {
    std::vector<BigInt> next(Q + 1, 0);
    for (std::size_t q = 0; q <= Q; ++q) {
      if (ways[q] == 0) continue;
      for (int a = 1; a <= units; ++a) {
        const std::size_t add = static_cast<std::size_t>(a) * static_cast<std::size_t>(a);
        if (q + add > Q) break;
        next[q + add] += 2 * ways[q];
      }
    }
    ways = std::move(next);
    BigInt tuples = 0;
    for (const auto& w : ways) tuples += w;
    if (tuples == 0) break;
    total += big_binomial(n, t) * tuples;
  }
  return total;
}

double big_log(const BigInt& x) {
  // Shift into double range before taking the logarithm.
  const std::size_t bits = x == 0 ? 0 : boost::multiprecision::msb(x) + 1;
  if (bits <= 1000) return std::log(x.convert_to<double>());
  const std::size_t shift = bits - 64;
  const BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

}  // namespace

NetHierarchy build_level_net(int n, int k) {
  if (n < 1 || n > kMaxNetDim) {
    throw std::invalid_argument("build_level_net: n must be in [1, " + std::to_string(kMaxNetDim) +
                                "]");
  }
  if (k < 1 || k > n || ((k + 1) & k) != 0) {
    throw std::invalid_argument("build_level_net: k must be 2^r - 1 with 1 <= k <= n");
  }
  NetHierarchy h;
  h.n = n;
  h.k = k;
  h.r = std::countr_zero(static_cast<unsigned>(k + 1));
  for (int i = 0; i < h.r; ++i) {
    NetLevel lv;
    lv.i = i;
    lv.support = 1 << i;
    lv.epsilon = static_cast<double>(lv.support) / (4.0 * k);
    lv.pitch = lv.epsilon / std::sqrt(static_cast<double>(lv.support));
    lv.max_units = (4 * k) / lv.support;
    lv.max_square_units = (16LL * k * k) / lv.support;
    lv.cardinality = count_lattice(n, lv.support, lv.max_units, lv.max_square_units);

    const BigInt binom = big_binomial(n, lv.support);
    BigInt numerator = binom;
    BigInt denominator = 1;
    for (int j = 0; j < lv.support; ++j) {
      numerator *= 12 * k;
      denominator *= lv.support;
    }
    lv.binomial_bound = (numerator + denominator - 1) / denominator;
    lv.within_bound = lv.cardinality * denominator <= numerator;
    lv.c_hat = big_log(lv.cardinality) /
               (lv.support * std::log(2.0 * n / static_cast<double>(lv.support)));
    h.levels.push_back(std::move(lv));
  }
  return h;
}

std::vector<SparsePoint> NetHierarchy::points(int i, std::uint64_t limit) const {
  if (i < 0 || i >= static_cast<int>(levels.size())) {
    throw std::out_of_range("NetHierarchy::points: no such level");
  }
  const NetLevel& lv = levels[static_cast<std::size_t>(i)];
  if (lv.cardinality > limit) {
    throw BudgetExceeded("NetHierarchy::points: level " + std::to_string(i) + " has " +
                         lv.cardinality.str() + " points");
  }
  std::vector<SparsePoint> out;
  out.reserve(lv.cardinality.convert_to<std::size_t>());
  std::vector<std::pair<int, int>> current;
  const std::function<void(int, std::int64_t)> extend = [&](int next, std::int64_t budget) {
    SparsePoint p;
    p.reserve(current.size());
    for (const auto& [idx, units] : current) p.emplace_back(idx, units * lv.pitch);
    out.push_back(std::move(p));
    if (static_cast<int>(current.size()) == lv.support) return;
    for (int idx = next; idx < n; ++idx) {
      for (int a = 1; a <= lv.max_units && a * a <= budget; ++a) {
        for (int sign : {-1, 1}) {
          current.emplace_back(idx, sign * a);
          extend(idx + 1, budget - a * a);
          current.pop_back();
        }
      }
    }
  };
  extend(0, lv.max_square_units);
  return out;
}

nlohmann::json net_to_json(const NetHierarchy& h, std::uint64_t limit) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : h.levels) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : h.points(lv.i, limit)) {
      nlohmann::json coords = nlohmann::json::array();
      for (const auto& [idx, val] : p) coords.push_back({idx + 1, val});
      points.push_back(std::move(coords));
    }
    levels.push_back({{"i", lv.i}, {"epsilon", lv.epsilon}, {"points", std::move(points)}});
  }
  return {{"n", h.n}, {"k", h.k}, {"levels", std::move(levels)}};
}

Vector round_to_level(const Vector& y, const NetLevel& level) {
  const Index n = y.size();
  std::vector<std::int64_t> units(static_cast<std::size_t>(n), 0);
  auto squared = [&] {
    std::int64_t s = 0;
    for (auto u : units) s += u * u;
    return s;
  };
  auto clamp = [&](double v) {
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(v), -level.max_units,
                                    level.max_units);
  };
  for (Index j = 0; j < n; ++j) units[static_cast<std::size_t>(j)] = clamp(std::round(y(j) / level.pitch));
  if (squared() > level.max_square_units) {
    for (Index j = 0; j < n; ++j) units[static_cast<std::size_t>(j)] = clamp(std::trunc(y(j) / level.pitch));
  }
  // Guard against y sitting a rounding error outside the ball.
  while (squared() > level.max_square_units) {
    auto it = std::max_element(units.begin(), units.end(), [](auto a, auto b) {
      return std::abs(a) < std::abs(b);
    });
    *it -= *it > 0 ? 1 : -1;
  }
  Vector out(n);
  for (Index j = 0; j < n; ++j) out(j) = static_cast<double>(units[static_cast<std::size_t>(j)]) * level.pitch;
  return out;
}

SparseDecomposition decompose_sparse(const Vector& x, const NetHierarchy& h) {
  if (x.size() != h.n) throw std::invalid_argument("decompose_sparse: dimension mismatch");
  std::vector<int> support;
  for (Index j = 0; j < x.size(); ++j) {
    if (x(j) != 0.0) support.push_back(static_cast<int>(j));
  }
  if (static_cast<int>(support.size()) > h.k) {
    throw std::invalid_argument("decompose_sparse: support exceeds k");
  }
  if (std::abs(x.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("decompose_sparse: x must be a unit vector");
  }
  std::stable_sort(support.begin(), support.end(),
                   [&](int a, int b) { return std::abs(x(a)) > std::abs(x(b)); });

  SparseDecomposition out;
  out.target = x;
  out.approximation = Vector::Zero(x.size());
  for (const auto& lv : h.levels) {
    const std::size_t lo = static_cast<std::size_t>(lv.support - 1);
    const std::size_t hi = std::min(static_cast<std::size_t>(2 * lv.support - 1), support.size());
    Vector block = Vector::Zero(x.size());
    for (std::size_t r = lo; r < hi; ++r) block(support[r]) = x(support[r]);
    Vector piece = round_to_level(block, lv);
    out.approximation += piece;
    out.pieces.push_back(std::move(piece));
  }
  out.error = (x - out.approximation).norm();
  return out;
}

}  // namespace chevetlab
