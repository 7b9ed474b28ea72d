#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "chevetlab/common.hpp"
#include "chevetlab/geometry.hpp"
#include "chevetlab/montecarlo.hpp"

namespace chevetlab {

/// Exact modes refuse instances with more candidate supports than this.
inline constexpr std::uint64_t kEnumerationBudget = 1'000'000;

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

enum class SearchMode { Exact, Heuristic };

/// Row set J and column set I, sorted, 0-based in memory. Serialized 1-based.
struct SupportPair {
  std::vector<int> rows;
  std::vector<int> cols;
  friend bool operator==(const SupportPair&, const SupportPair&) = default;
};

void to_json(nlohmann::json& j, const SupportPair& s);
void from_json(const nlohmann::json& j, SupportPair& s);

struct SearchOptions {
  int restarts = 8;
  std::uint64_t seed = 0x73756273ULL;
  unsigned workers = default_workers();
};

struct GammaKmResult {
  OpNormResult norm;
  SupportPair support;
};

/// Largest spectral norm over k-row, m-column submatrices. Exact mode
/// enumerates every support pair (ties go to the lexicographically smallest
/// pair) and throws BudgetExceeded above kEnumerationBudget pairs. Heuristic
/// mode returns a lower bound: supports seeded by the leading singular vectors
/// and by the largest entries, grown greedily and refined by single swaps.
GammaKmResult gamma_km(const Matrix& gamma, int k, int m, SearchMode mode,
                       const SearchOptions& opts = {});

/// Whether exact gamma_km is available: k = 1 or m = 1 (closed form), or the
/// pair count fits the enumeration budget.
bool gamma_km_exact_feasible(int n, int N, int k, int m);

struct RicResult {
  double delta = 0.0;
  std::vector<int> support;  // sorted, 0-based
  Vector x;                  // unit, supported on `support`, length N
  Exactness exactness = Exactness::Exact;
};

void to_json(nlohmann::json& j, const RicResult& r);

/// Restricted isometry constant of Gamma / sqrt(n) at order m:
/// max over |I| = m of || Gamma_I^T Gamma_I / n - Id ||.
RicResult ric(const Matrix& gamma, int m, SearchMode mode, const SearchOptions& opts = {});

}  // namespace chevetlab
