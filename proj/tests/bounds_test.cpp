#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "chevetlab/bounds.hpp"

namespace chevetlab {
namespace {

double harmonic(int n) {
  double h = 0.0;
  for (int i = 1; i <= n; ++i) h += 1.0 / i;
  return h;
}

TEST(ClosedForms, SubmatrixAndSparseScalings) {
  EXPECT_NEAR(subm_bound(1, 1, 32, 32), 2.0 * std::log(96.0), 1e-14);
  EXPECT_NEAR(subm_bound(4, 9, 16, 27), 3.0 * std::log(9.0) + 2.0 * std::log(12.0), 1e-14);
  EXPECT_NEAR(estUm_closed(4, 64), 2.0 * std::log(48.0), 1e-14);
  EXPECT_NEAR(lonenorm_bound(8, 1), 8.0, 0.0);
  EXPECT_NEAR(lonenorm_bound(8, 4096), 8.0 + 12.0 * std::log(2.0), 1e-13);
  EXPECT_THROW(subm_bound(0, 1, 4, 4), std::invalid_argument);
  EXPECT_THROW(subm_bound(1, 5, 4, 4), std::invalid_argument);
  EXPECT_THROW(estUm_closed(5, 4), std::invalid_argument);
}

TEST(EstUm, ExtremeLevelsHaveClosedForms) {
  // Top-1 norm is the maximum of n i.i.d. |Laplace| = Exp(sqrt 2): H_n / sqrt 2.
  for (int n : {4, 16}) {
    const auto top1 = estUm_exact(1, n, 100000, 3);
    EXPECT_NEAR(top1.mean, harmonic(n) / std::sqrt(2.0), 4.0 * top1.se);
  }
  // Top-n norm is the Euclidean norm; E|Y|^2 = n bounds it from above.
  const auto full = estUm_exact(16, 16, 20000, 4);
  EXPECT_LT(full.mean, 4.0);
  EXPECT_GT(full.mean, 3.5);
}

TEST(EstUm, MonotoneInLevel) {
  double prev = 0.0;
  for (int l : {1, 2, 4, 8, 16}) {
    const auto e = estUm_exact(l, 16, 5000, 9);
    EXPECT_GT(e.mean, prev);
    prev = e.mean;
  }
}

TEST(ChevetRhs, EuclideanTermsAreEuclideanNorms) {
  const auto b = chevet_rhs(BallSpec::l2(6), BallSpec::l2(4), 40000, 5);
  EXPECT_DOUBLE_EQ(b.radius_K, 1.0);
  EXPECT_DOUBLE_EQ(b.radius_Lpolar, 1.0);
  // E|Y_d| lies in [sqrt(d) - 1/sqrt(d), sqrt(d)] up to noise.
  EXPECT_LE(b.row_norm.mean, 2.0 + 4.0 * b.row_norm.se);
  EXPECT_GE(b.row_norm.mean, 1.5);
  EXPECT_LE(b.col_norm.mean, std::sqrt(6.0) + 4.0 * b.col_norm.se);
  EXPECT_DOUBLE_EQ(b.total, b.termK + b.termL);
  EXPECT_DOUBLE_EQ(b.termK, b.radius_K * b.row_norm.mean);
  EXPECT_DOUBLE_EQ(b.termL, b.radius_Lpolar * b.col_norm.mean);
}

TEST(ChevetRhs, L1ToL1Terms) {
  const int n = 5;
  const int N = 7;
  const auto b = chevet_rhs(BallSpec::l1(N), BallSpec::l1(n), 40000, 6);
  EXPECT_DOUBLE_EQ(b.radius_K, 1.0);
  EXPECT_NEAR(b.radius_Lpolar, std::sqrt(n), 1e-12);
  // E||Y_n||_1 = n / sqrt 2 and E||Y_N||_inf = H_N / sqrt 2.
  EXPECT_NEAR(b.row_norm.mean, n / std::sqrt(2.0), 4.0 * b.row_norm.se);
  EXPECT_NEAR(b.col_norm.mean, harmonic(N) / std::sqrt(2.0), 4.0 * b.col_norm.se);
}

TEST(ChevetRhs, GaussianVariant) {
  const auto b = gaussian_chevet_rhs(BallSpec::l1(3), BallSpec::l1(4), 40000, 7);
  EXPECT_NEAR(b.row_norm.mean, 4.0 * std::sqrt(2.0 / M_PI), 4.0 * b.row_norm.se);
}

TEST(ChevetLower, HalfOfTheWeightedTerms) {
  const auto K = BallSpec::l1(7);
  const auto L = BallSpec::l2(5);
  const auto b = chevet_rhs(K, L, 5000, 8);
  const auto lower = chevet_lower(b, K, L);
  EXPECT_NEAR(lower.mean, 0.5 * (b.row_norm.mean + b.col_norm.mean), 1e-12);
  EXPECT_LE(lower.mean, b.total);
  const auto direct = chevet_lower(K, L, 5000, 8);
  EXPECT_DOUBLE_EQ(direct.mean, lower.mean);
}

TEST(ChevetRhs, WorkerIndependent) {
  const auto a = chevet_rhs(BallSpec::sparse_hull(6, 2), BallSpec::sparse_polar(4, 2), 3000, 1, 1);
  const auto b = chevet_rhs(BallSpec::sparse_hull(6, 2), BallSpec::sparse_polar(4, 2), 3000, 1, 5);
  EXPECT_EQ(nlohmann::json(a).dump(), nlohmann::json(b).dump());
}

TEST(ChevetRhs, RejectsMismatchAndFewTrials) {
  EXPECT_THROW(chevet_rhs(BallSpec::l2(3), BallSpec::l2(3), 999, 1), std::invalid_argument);
  EXPECT_THROW(estUm_exact(1, 4, 99, 1), std::invalid_argument);
}

TEST(TailParams, CorpusPairs) {
  const auto e = tail_params(BallSpec::l2(16), BallSpec::l2(16));
  EXPECT_DOUBLE_EQ(e.sigma, 1.0);
  EXPECT_DOUBLE_EQ(e.sigma_prime, 1.0);
  const auto c = tail_params(BallSpec::linf(4), BallSpec::l1(9));
  EXPECT_NEAR(c.sigma, 2.0 * 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(c.sigma_prime, 1.0);
  EXPECT_GE(c.a, c.b);
}

TEST(TailShape, QuadraticThenLinear) {
  TailParams p;
  p.sigma = 2.0;
  p.sigma_prime = 1.0;
  EXPECT_DOUBLE_EQ(tail_shape(0.0, p, 1.0), 1.0);
  EXPECT_NEAR(tail_shape(1.0, p, 1.0), std::exp(-0.25), 1e-15);
  EXPECT_NEAR(tail_shape(8.0, p, 0.5), std::exp(-4.0), 1e-15);
  double prev = 1.0;
  for (double t = 0.1; t < 20.0; t += 0.1) {
    const double v = tail_shape(t, p, 1.0);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_THROW(tail_shape(-1.0, p, 1.0), std::invalid_argument);
}

TEST(RipThreshold, BothBranches) {
  const double theta = 0.5;
  const double l3 = std::log(6.0);
  const auto small = rip_admissible_m(theta, 400, 300, 1.0);
  EXPECT_EQ(small.branch, RipBranch::SmallN);
  EXPECT_EQ(small.m, static_cast<long long>(std::floor(0.25 * 400 / (l3 * l3 * l3))));
  const auto large = rip_admissible_m(theta, 400, 4000, 1.0);
  EXPECT_EQ(large.branch, RipBranch::LargeN);
  const double lr = std::log(3.0 * 4000 / 200.0);
  EXPECT_EQ(large.m, static_cast<long long>(std::floor(0.5 * 400 / lr * std::min(1.0 / lr, 0.5 / (l3 * l3)))));
  EXPECT_EQ(rip_admissible_m(theta, 4, 4, 1.0).m, 0);
  EXPECT_EQ(nlohmann::json(large)["branch"], "ii");
  EXPECT_THROW(rip_admissible_m(1.0, 4, 4, 1.0), std::invalid_argument);
}

TEST(RipThreshold, MonotoneInConstantAndRows) {
  long long prev = 0;
  for (int n : {16, 64, 256, 1024}) {
    const auto r = rip_admissible_m(0.5, n, 2 * n, 1.0);
    EXPECT_GE(r.m, prev);
    prev = r.m;
    EXPECT_LE(r.m, rip_admissible_m(0.5, n, 2 * n, 2.0).m);
  }
}

TEST(RipFailureProbability, Formula) {
  const double v = rip_failure_probability(0.5, 4, 100, 200, 1.0);
  const double ln = std::log(100.0);
  EXPECT_NEAR(v, std::exp(-25.0 / (ln * ln)) + 2.0 * std::exp(-2.0 * std::log(150.0)), 1e-15);
  EXPECT_THROW(rip_failure_probability(0.5, 0, 100, 200, 1.0), std::invalid_argument);
}

}  // namespace
}  // namespace chevetlab
