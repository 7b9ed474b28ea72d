#include "chevetlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>

namespace chevetlab {

unsigned default_workers() {
  if (const char* env = std::getenv("CHEVETLAB_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t nthreads = std::min<std::size_t>(workers, count);
  const std::size_t chunk = (count + nthreads - 1) / nthreads;
  std::vector<std::exception_ptr> errors(nthreads);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t w = 0; w < nthreads; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<double> sample_trials(std::int64_t trials, std::uint64_t seed,
                                  const std::function<double(Rng&)>& fn,
                                  unsigned workers) {
  if (trials < 1) throw std::invalid_argument("sample_trials: trials must be >= 1");
  std::vector<double> values(static_cast<std::size_t>(trials));
  parallel_for(values.size(), workers, [&](std::size_t t) {
    Rng rng = substream(seed, t);
    values[t] = fn(rng);
  });
  return values;
}

EstimateWithCI summarize(std::span<const double> values, std::uint64_t seed) {
  EstimateWithCI est;
  est.trials = static_cast<std::int64_t>(values.size());
  est.seed = seed;
  if (values.empty()) return est;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  est.mean = mean;
  if (values.size() > 1) {
    const double var = ss / static_cast<double>(values.size() - 1);
    est.se = std::sqrt(var / static_cast<double>(values.size()));
  }
  return est;
}

}  // namespace chevetlab
