#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "chevetlab/ensembles.hpp"
#include "chevetlab/submatrix.hpp"

namespace chevetlab {
namespace {

Matrix exponential_matrix(int n, int N, std::uint64_t seed) {
  Rng rng = substream(seed, 0);
  return sample(EnsembleSpec::of(EnsembleKind::Exponential, n, N), rng);
}

/// Calls f(subset) for every k-subset of {0..n-1} in lexicographic order.
template <typename F>
void for_each_subset(int n, int k, F&& f) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

Matrix block(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = a(rows[i], cols[j]);
  return out;
}

double svd_norm(const Matrix& a) { return Eigen::JacobiSVD<Matrix>(a).singularValues()(0); }

double brute_gamma_km(const Matrix& a, int k, int m) {
  double best = 0.0;
  for_each_subset(static_cast<int>(a.rows()), k, [&](const std::vector<int>& r) {
    for_each_subset(static_cast<int>(a.cols()), m, [&](const std::vector<int>& c) {
      best = std::max(best, svd_norm(block(a, r, c)));
    });
  });
  return best;
}

double brute_ric(const Matrix& a, int m) {
  const double n = static_cast<double>(a.rows());
  double best = 0.0;
  for_each_subset(static_cast<int>(a.cols()), m, [&](const std::vector<int>& c) {
    std::vector<int> rows(static_cast<std::size_t>(a.rows()));
    for (int i = 0; i < a.rows(); ++i) rows[static_cast<std::size_t>(i)] = i;
    const Matrix s = block(a, rows, c);
    const Matrix g = s.transpose() * s / n - Matrix::Identity(m, m);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    best = std::max(best, eig.eigenvalues().cwiseAbs().maxCoeff());
  });
  return best;
}

TEST(Binomial, SmallValuesAndSaturation) {
  EXPECT_EQ(binomial(5, 2), 10u);
  EXPECT_EQ(binomial(32, 8), 10518300u);
  EXPECT_EQ(binomial(64, 32), 1832624140942590534ULL);
  EXPECT_EQ(binomial(4, 5), 0u);
  EXPECT_EQ(binomial(7, 0), 1u);
  EXPECT_EQ(binomial(200, 100), UINT64_MAX);
}

TEST(GammaKm, ExactMatchesIndependentSvd) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix a = exponential_matrix(6, 8, s);
    for (int k = 1; k <= 3; ++k) {
      for (int m = 1; m <= 3; ++m) {
        const auto r = gamma_km(a, k, m, SearchMode::Exact);
        const double oracle = brute_gamma_km(a, k, m);
        EXPECT_NEAR(r.norm.value, oracle, 1e-9 * oracle);
        EXPECT_TRUE(r.norm.exact());
        EXPECT_NEAR(svd_norm(block(a, r.support.rows, r.support.cols)), r.norm.value, 1e-9 * oracle);
      }
    }
  }
}

TEST(GammaKm, HeuristicIsALowerBound) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Matrix a = exponential_matrix(6, 8, 100 + s);
    for (int k = 1; k <= 3; ++k) {
      for (int m = 1; m <= 3; ++m) {
        const auto h = gamma_km(a, k, m, SearchMode::Heuristic);
        const auto e = gamma_km(a, k, m, SearchMode::Exact);
        EXPECT_LE(h.norm.value, e.norm.value * (1.0 + 1e-12));
        EXPECT_GE(h.norm.value, 0.9 * e.norm.value);
        EXPECT_EQ(static_cast<int>(h.support.rows.size()), k);
        EXPECT_EQ(static_cast<int>(h.support.cols.size()), m);
        EXPECT_TRUE(std::is_sorted(h.support.rows.begin(), h.support.rows.end()));
      }
    }
  }
}

TEST(GammaKm, ClosedFormCases) {
  const Matrix a = exponential_matrix(5, 9, 7);
  EXPECT_DOUBLE_EQ(gamma_km(a, 1, 1, SearchMode::Exact).norm.value, a.cwiseAbs().maxCoeff());
  EXPECT_NEAR(gamma_km(a, 5, 9, SearchMode::Exact).norm.value, svd_norm(a), 1e-10);
  double best_row = 0.0;
  for (Index i = 0; i < a.rows(); ++i) best_row = std::max(best_row, a.row(i).norm());
  EXPECT_NEAR(gamma_km(a, 1, 9, SearchMode::Exact).norm.value, best_row, 1e-12);
}

TEST(GammaKm, ClosedFormBeyondBudget) {
  const Matrix a = exponential_matrix(64, 64, 8);
  EXPECT_FALSE(gamma_km_exact_feasible(64, 64, 8, 8));
  EXPECT_TRUE(gamma_km_exact_feasible(64, 64, 1, 8));
  EXPECT_TRUE(gamma_km_exact_feasible(64, 64, 8, 1));
  EXPECT_THROW(gamma_km(a, 8, 8, SearchMode::Exact), BudgetExceeded);
  const auto r = gamma_km(a, 1, 8, SearchMode::Exact);
  double best = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    Vector row = a.row(i).transpose().cwiseAbs();
    std::sort(row.data(), row.data() + row.size(), std::greater<>());
    best = std::max(best, row.head(8).norm());
  }
  EXPECT_NEAR(r.norm.value, best, 1e-12);
  EXPECT_TRUE(r.norm.exact());
}

TEST(GammaKm, MonotoneInBothOrders) {
  const Matrix a = exponential_matrix(6, 7, 9);
  for (int k = 1; k <= 6; ++k) {
    for (int m = 1; m <= 7; ++m) {
      const double v = gamma_km(a, k, m, SearchMode::Exact).norm.value;
      if (k > 1) { EXPECT_GE(v + 1e-12, gamma_km(a, k - 1, m, SearchMode::Exact).norm.value); }
      if (m > 1) { EXPECT_GE(v + 1e-12, gamma_km(a, k, m - 1, SearchMode::Exact).norm.value); }
    }
  }
}

TEST(GammaKm, TiesGoToLexicographicallySmallestSupport) {
  const Matrix ones = Matrix::Ones(4, 5);
  for (unsigned workers : {1u, 4u}) {
    SearchOptions opts;
    opts.workers = workers;
    const auto r = gamma_km(ones, 2, 3, SearchMode::Exact, opts);
    EXPECT_EQ(r.support.rows, (std::vector<int>{0, 1}));
    EXPECT_EQ(r.support.cols, (std::vector<int>{0, 1, 2}));
    EXPECT_NEAR(r.norm.value, std::sqrt(6.0), 1e-12);
  }
}

TEST(GammaKm, WorkerCountDoesNotChangeResult) {
  const Matrix a = exponential_matrix(8, 8, 10);
  SearchOptions one;
  one.workers = 1;
  SearchOptions many;
  many.workers = 6;
  for (auto mode : {SearchMode::Exact, SearchMode::Heuristic}) {
    const auto x = gamma_km(a, 3, 2, mode, one);
    const auto y = gamma_km(a, 3, 2, mode, many);
    EXPECT_EQ(x.norm.value, y.norm.value);
    EXPECT_EQ(x.support, y.support);
  }
}

TEST(GammaKm, InvalidOrders) {
  const Matrix a = exponential_matrix(3, 3, 1);
  EXPECT_THROW(gamma_km(a, 0, 1, SearchMode::Exact), std::invalid_argument);
  EXPECT_THROW(gamma_km(a, 1, 4, SearchMode::Exact), std::invalid_argument);
}

TEST(SupportPair, JsonIsOneBased) {
  const SupportPair s{{0, 2}, {1}};
  const nlohmann::json j = s;
  EXPECT_EQ(j["rows"], nlohmann::json({1, 3}));
  EXPECT_EQ(j["cols"], nlohmann::json({2}));
  EXPECT_EQ(j.get<SupportPair>(), s);
}

TEST(Ric, ScaledIdentityIsIsometric) {
  const int n = 6;
  const Matrix a = std::sqrt(static_cast<double>(n)) * Matrix::Identity(n, n);
  for (int m = 1; m <= 3; ++m) {
    EXPECT_NEAR(ric(a, m, SearchMode::Exact).delta, 0.0, 1e-12);
    EXPECT_NEAR(ric(a, m, SearchMode::Heuristic).delta, 0.0, 1e-12);
  }
}

TEST(Ric, DuplicatedColumnGivesDeltaOne) {
  Matrix a = exponential_matrix(6, 8, 3);
  for (Index j = 0; j < a.cols(); ++j) a.col(j) *= std::sqrt(6.0) / a.col(j).norm();
  a.col(5) = a.col(2);
  const auto r = ric(a, 2, SearchMode::Exact);
  EXPECT_NEAR(r.delta, 1.0, 1e-9);
  EXPECT_EQ(r.support, (std::vector<int>{2, 5}));
}

TEST(Ric, ExactMatchesEigenOracleAndHeuristicIsBelow) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix a = exponential_matrix(6, 8, 200 + s);
    for (int m = 1; m <= 3; ++m) {
      const auto e = ric(a, m, SearchMode::Exact);
      EXPECT_NEAR(e.delta, brute_ric(a, m), 1e-9 * std::max(1.0, e.delta));
      EXPECT_LE(ric(a, m, SearchMode::Heuristic).delta, e.delta + 1e-12);
    }
  }
}

TEST(Ric, WitnessAndSampledSandwich) {
  const Matrix a = exponential_matrix(10, 12, 4);
  const int m = 3;
  const auto r = ric(a, m, SearchMode::Exact);
  const double n = 10.0;
  ASSERT_EQ(r.x.size(), 12);
  EXPECT_NEAR(r.x.norm(), 1.0, 1e-12);
  for (Index j = 0; j < r.x.size(); ++j) {
    if (std::find(r.support.begin(), r.support.end(), static_cast<int>(j)) == r.support.end()) {
      EXPECT_EQ(r.x(j), 0.0);
    }
  }
  const double q = (a * r.x).squaredNorm() / n;
  EXPECT_NEAR(std::abs(q - 1.0), r.delta, 1e-9);

  Rng rng = substream(4, 4);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> coord(0, 11);
  for (int t = 0; t < 10000; ++t) {
    Vector x = Vector::Zero(12);
    for (int i = 0; i < m; ++i) x(coord(rng)) = normal(rng);
    if (x.norm() == 0.0) continue;
    x /= x.norm();
    const double v = (a * x).squaredNorm() / n;
    ASSERT_GE(v, 1.0 - r.delta - 1e-9);
    ASSERT_LE(v, 1.0 + r.delta + 1e-9);
  }
}

TEST(Ric, BudgetAndJson) {
  const Matrix a = exponential_matrix(4, 64, 5);
  EXPECT_THROW(ric(a, 8, SearchMode::Exact), BudgetExceeded);
  const auto h = ric(a, 8, SearchMode::Heuristic);
  EXPECT_EQ(h.exactness, Exactness::LowerBound);
  const nlohmann::json j = ric(exponential_matrix(4, 6, 5), 2, SearchMode::Exact);
  EXPECT_TRUE(j.contains("delta"));
  for (const auto& i : j["support"]) EXPECT_GE(i.get<int>(), 1);
}

}  // namespace
}  // namespace chevetlab
