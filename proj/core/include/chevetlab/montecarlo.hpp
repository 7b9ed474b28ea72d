#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "chevetlab/rng.hpp"

namespace chevetlab {

/// Monte Carlo estimate of an expectation.
struct EstimateWithCI {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Worker count from CHEVETLAB_WORKERS, else hardware concurrency (>= 1).
unsigned default_workers();

/// Runs fn(i) for i in [0, count) on up to `workers` threads with static
/// contiguous chunks. fn must only write to storage owned by index i.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

/// Per-trial values; trial t uses substream(seed, t). The returned vector is
/// identical for every worker count.
std::vector<double> sample_trials(std::int64_t trials, std::uint64_t seed,
                                  const std::function<double(Rng&)>& fn,
                                  unsigned workers = default_workers());

/// Mean and standard error from per-trial values, reduced in index order.
EstimateWithCI summarize(std::span<const double> values, std::uint64_t seed);

inline EstimateWithCI monte_carlo(std::int64_t trials, std::uint64_t seed,
                                  const std::function<double(Rng&)>& fn,
                                  unsigned workers = default_workers()) {
  const auto values = sample_trials(trials, seed, fn, workers);
  return summarize(values, seed);
}

}  // namespace chevetlab
