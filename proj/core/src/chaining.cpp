#include "chevetlab/chaining.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace chevetlab {

namespace {

void check_set(const Matrix& T, int q) {
  if (T.cols() < 1) throw std::invalid_argument("chaining: empty point set");
  if (T.rows() > kMaxChainingDim) {
    throw std::invalid_argument("chaining: dimension exceeds " + std::to_string(kMaxChainingDim));
  }
  if (T.cols() > kMaxChainingPoints) {
    throw std::invalid_argument("chaining: more than " + std::to_string(kMaxChainingPoints) +
                                " points");
  }
  if (q != 1 && q != 2) throw std::invalid_argument("chaining: q must be 1 or 2");
}

double distance(const Matrix& T, Index a, Index b, Metric metric) {
  const auto diff = T.col(a) - T.col(b);
  return metric == Metric::Euclidean ? diff.norm() : diff.lpNorm<Eigen::Infinity>();
}

Matrix distance_matrix(const Matrix& T, Metric metric) {
  const Index p = T.cols();
  Matrix d(p, p);
  for (Index a = 0; a < p; ++a) {
    d(a, a) = 0.0;
    for (Index b = a + 1; b < p; ++b) d(a, b) = d(b, a) = distance(T, a, b, metric);
  }
  return d;
}

/// Budget for A_s: 1 at s = 0, else 2^(2^s), capped at `cap`.
std::size_t level_size(int s, std::size_t cap) {
  if (s == 0) return 1;
  if (s >= 6) return cap;
  const unsigned bits = 1u << s;
  if (bits >= 63) return cap;
  return static_cast<std::size_t>(std::min<std::uint64_t>(std::uint64_t{1} << bits, cap));
}

double functional_from_distances(const Matrix& d, const AdmissibleSequence& seq, int q) {
  double worst = 0.0;
  for (Index t = 0; t < d.rows(); ++t) {
    double sum = 0.0;
    for (std::size_t s = 0; s < seq.levels.size(); ++s) {
      double nearest = std::numeric_limits<double>::infinity();
      for (int a : seq.levels[s]) nearest = std::min(nearest, d(t, a));
      sum += std::pow(2.0, static_cast<double>(s) / q) * nearest;
    }
    worst = std::max(worst, sum);
  }
  return worst;
}

}  // namespace

double chaining_functional(const Matrix& T, const AdmissibleSequence& seq, int q, Metric metric) {
  check_set(T, q);
  return functional_from_distances(distance_matrix(T, metric), seq, q);
}

GammaBound gamma_q_upper(const Matrix& T, int q, Metric metric) {
  check_set(T, q);
  const Index p = T.cols();
  const Matrix d = distance_matrix(T, metric);

  const Vector centroid = T.rowwise().mean();
  Index start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (Index t = 0; t < p; ++t) {
    const auto diff = T.col(t) - centroid;
    const double v = metric == Metric::Euclidean ? diff.norm() : diff.lpNorm<Eigen::Infinity>();
    if (v < best) {
      best = v;
      start = t;
    }
  }

  std::vector<int> order{static_cast<int>(start)};
  Vector nearest = d.col(start);
  std::vector<char> used(static_cast<std::size_t>(p), 0);
  used[static_cast<std::size_t>(start)] = 1;
  while (static_cast<Index>(order.size()) < p) {
    Index far = -1;
    double far_d = -1.0;
    for (Index t = 0; t < p; ++t) {
      if (!used[static_cast<std::size_t>(t)] && nearest(t) > far_d) {
        far_d = nearest(t);
        far = t;
      }
    }
    used[static_cast<std::size_t>(far)] = 1;
    order.push_back(static_cast<int>(far));
    nearest = nearest.cwiseMin(d.col(far));
  }

  GammaBound out;
  for (int s = 0;; ++s) {
    const std::size_t size = level_size(s, order.size());
    out.sequence.levels.emplace_back(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(size));
    if (size == order.size()) break;
  }
  out.value = functional_from_distances(d, out.sequence, q);
  return out;
}

GammaBound gamma_q_exact(const Matrix& T, int q, Metric metric) {
  check_set(T, q);
  const int p = static_cast<int>(T.cols());
  if (p > kMaxExactChainingPoints) {
    throw std::invalid_argument("gamma_q_exact: at most 8 points");
  }
  const Matrix d = distance_matrix(T, metric);
  std::vector<int> all(static_cast<std::size_t>(p));
  std::iota(all.begin(), all.end(), 0);
  if (p == 1) return {0.0, {{all}}};

  // Larger A_s never hurts, so A_1 has exactly min(4, |T|) points and A_2 = T.
  const int a1 = std::min(4, p);
  GammaBound best;
  best.value = std::numeric_limits<double>::infinity();
  for (int a0 = 0; a0 < p; ++a0) {
    for (unsigned mask = 0; mask < (1u << p); ++mask) {
      if (std::popcount(mask) != a1) continue;
      std::vector<int> level1;
      for (int t = 0; t < p; ++t) {
        if (mask & (1u << t)) level1.push_back(t);
      }
      AdmissibleSequence seq{{{a0}, level1}};
      if (a1 < p) seq.levels.push_back(all);
      const double v = functional_from_distances(d, seq, q);
      if (v < best.value) {
        best.value = v;
        best.sequence = std::move(seq);
      }
    }
  }
  return best;
}

EstimateWithCI emp_sup_process(const Matrix& T, Law law, std::int64_t trials, std::uint64_t seed,
                               unsigned workers) {
  if (T.cols() < 1) throw std::invalid_argument("emp_sup_process: empty point set");
  if (trials < 100) throw std::invalid_argument("emp_sup_process: trials must be >= 100");
  const Index dim = T.rows();
  return monte_carlo(
      trials, seed,
      [&](Rng& rng) {
        Vector xi(dim);
        fill_law(law, rng, std::span<double>(xi.data(), static_cast<std::size_t>(dim)));
        return (T.transpose() * xi).maxCoeff();
      },
      workers);
}

}  // namespace chevetlab
