#pragma once

#include <cstdint>
#include <vector>

#include "chevetlab/common.hpp"
#include "chevetlab/ensembles.hpp"
#include "chevetlab/montecarlo.hpp"

namespace chevetlab {

/// Chaining constant for both process bounds:
///   E sup_T <z, g> <= kChainingConstant * gamma_2(T, |.|)
///   E sup_T <z, E> <= kChainingConstant * (gamma_2(T, |.|) + gamma_1(T, ||.||_inf))
/// Derived by the union-bound chaining argument with |A_0| = 1,
/// |A_s| <= 2^(2^s); tests/chaining_constant_test.cpp re-derives it.
inline constexpr double kChainingConstant = 10.66;

enum class Metric { Euclidean, Sup };

/// Point sets are stored column-wise: T is dim x |T|.
inline constexpr int kMaxChainingDim = 64;
inline constexpr int kMaxChainingPoints = 4096;
inline constexpr int kMaxExactChainingPoints = 8;

/// A_0, A_1, ... as index sets into T; |A_0| = 1 and |A_s| <= 2^(2^s).
struct AdmissibleSequence {
  std::vector<std::vector<int>> levels;
};

struct GammaBound {
  double value = 0.0;
  AdmissibleSequence sequence;
};

/// sup_t sum_{s>=0} 2^(s/q) d(t, A_s) for the given sequence.
double chaining_functional(const Matrix& T, const AdmissibleSequence& seq, int q, Metric metric);

/// Upper bound on gamma_q(T, metric) from the farthest-point sequence:
/// A_s is the first min(|A_s| budget, |T|) points of a farthest-point order
/// started at the point nearest the centroid.
GammaBound gamma_q_upper(const Matrix& T, int q, Metric metric);

/// Exact gamma_q over sequences with A_s inside T, for |T| <= 8.
GammaBound gamma_q_exact(const Matrix& T, int q, Metric metric);

/// Monte Carlo estimate of E sup_{z in T} <z, xi> for xi with i.i.d. entries
/// of the given law.
EstimateWithCI emp_sup_process(const Matrix& T, Law law, std::int64_t trials,
                               std::uint64_t seed, unsigned workers = default_workers());

}  // namespace chevetlab
