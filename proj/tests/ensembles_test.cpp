#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "chevetlab/ensembles.hpp"
#include "chevetlab/stats.hpp"

namespace chevetlab {
namespace {

constexpr EnsembleKind kAllKinds[] = {
    EnsembleKind::Gaussian,      EnsembleKind::Exponential,        EnsembleKind::UniformCube,
    EnsembleKind::UniformBpBall, EnsembleKind::RotatedExponential, EnsembleKind::IndependentLcRows};

/// Inverse-CDF Laplace draw with variance one, independent of draw_exponential.
double laplace_inverse_cdf(double u) {
  const double b = 1.0 / std::sqrt(2.0);
  return u < 0.5 ? b * std::log(2.0 * u) : -b * std::log(2.0 * (1.0 - u));
}

TEST(DrawExponential, MatchesInverseCdfLaw) {
  Rng rng = substream(11, 0);
  Rng ref = substream(11, 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> a(20000), b(20000);
  for (auto& x : a) x = draw_exponential(rng);
  for (auto& x : b) x = laplace_inverse_cdf(std::max(unif(ref), 1e-300));
  EXPECT_GT(stats::ks_two_sample(a, b).p_value, 1e-3);
}

TEST(DrawExponential, UnitVarianceAndKurtosisSix) {
  Rng rng = substream(12, 0);
  const int trials = 400000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < trials; ++i) {
    const double x = draw_exponential(rng);
    m1 += x;
    m2 += x * x;
    m4 += x * x * x * x;
  }
  m1 /= trials;
  m2 /= trials;
  m4 /= trials;
  EXPECT_NEAR(m1, 0.0, 4.0 / std::sqrt(trials));
  EXPECT_NEAR(m2, 1.0, 4.0 * std::sqrt(5.0 / trials));
  // Laplace: E X^4 = 6 (E X^2)^2.
  EXPECT_NEAR(m4, 6.0, 0.25);
}

TEST(FillLaw, GaussianAndExponentialDiffer) {
  Rng a = substream(2, 0);
  Rng b = substream(2, 0);
  std::vector<double> g(8), e(8);
  fill_law(Law::Gaussian, a, g);
  fill_law(Law::Exponential, b, e);
  EXPECT_NE(g, e);
  EXPECT_EQ(law_from_string(to_string(Law::Exponential)), Law::Exponential);
  EXPECT_THROW(law_from_string("cauchy"), std::invalid_argument);
}

TEST(BpBallVariance, ClosedForms) {
  for (int N : {1, 2, 5, 16}) {
    EXPECT_NEAR(bp_ball_coordinate_variance(2.0, N), 1.0 / (N + 2), 1e-12);
    EXPECT_NEAR(bp_ball_coordinate_variance(1.0, N), 2.0 / ((N + 1.0) * (N + 2.0)), 1e-12);
  }
}

TEST(BpBallVariance, MatchesRejectionSampling) {
  const double p = 3.0;
  const int N = 2;
  Rng rng = substream(13, 0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double sum = 0.0;
  int accepted = 0;
  while (accepted < 400000) {
    const double x = unif(rng);
    const double y = unif(rng);
    if (std::pow(std::abs(x), p) + std::pow(std::abs(y), p) > 1.0) continue;
    sum += x * x;
    ++accepted;
  }
  EXPECT_NEAR(bp_ball_coordinate_variance(p, N), sum / accepted, 2e-3);
}

TEST(RandomOrthogonal, IsOrthogonal) {
  Rng rng = substream(14, 0);
  for (int d : {1, 2, 5, 17}) {
    const Matrix q = random_orthogonal(d, rng);
    EXPECT_LT((q.transpose() * q - Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(RandomOrthogonal, FirstEntryHasHaarMoments) {
  // For Haar U on O(d), U_11^2 ~ Beta(1/2, (d-1)/2): mean 1/d.
  const int d = 4;
  const int trials = 20000;
  Rng rng = substream(15, 0);
  double m = 0.0;
  double signs = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Matrix q = random_orthogonal(d, rng);
    m += q(0, 0) * q(0, 0);
    signs += q(0, 0) > 0 ? 1.0 : -1.0;
  }
  EXPECT_NEAR(m / trials, 1.0 / d, 0.01);
  EXPECT_NEAR(signs / trials, 0.0, 0.03);
}

TEST(Sampler, DeterministicGivenTheStream) {
  for (auto kind : kAllKinds) {
    const auto spec = EnsembleSpec::of(kind, 3, 4);
    Rng a = substream(5, 1);
    Rng b = substream(5, 1);
    EXPECT_EQ(sample(spec, a), sample(spec, b)) << to_string(kind);
  }
}

TEST(Sampler, RotatedExponentialIsRotationTimesExponential) {
  const auto spec = EnsembleSpec::of(EnsembleKind::RotatedExponential, 3, 5);
  Rng rot = substream(3, 3);
  const Matrix u = random_orthogonal(3, rot);
  const Sampler rotated(spec, u);
  Rng a = substream(8, 0);
  Rng b = substream(8, 0);
  const Matrix x = rotated(a);
  const Matrix g = sample(EnsembleSpec::of(EnsembleKind::Exponential, 3, 5), b);
  EXPECT_LT((x - u * g).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(Sampler(EnsembleSpec::of(EnsembleKind::Gaussian, 3, 5), u), std::invalid_argument);
  EXPECT_THROW(Sampler(spec, Matrix::Identity(2, 2)), std::invalid_argument);
}

TEST(Sampler, RotationSeedFixesRotation) {
  auto spec = EnsembleSpec::of(EnsembleKind::RotatedExponential, 4, 2);
  spec.rotation_seed = 9;
  EXPECT_EQ(Sampler(spec).rotation(), Sampler(spec).rotation());
  auto other = spec;
  other.rotation_seed = 10;
  EXPECT_NE(Sampler(spec).rotation(), Sampler(other).rotation());
}

TEST(Sampler, SupportOfBoundedLaws) {
  Rng rng = substream(6, 0);
  const Matrix cube = sample(EnsembleSpec::of(EnsembleKind::UniformCube, 50, 50), rng);
  EXPECT_LE(cube.cwiseAbs().maxCoeff(), std::sqrt(3.0));
  auto ball = EnsembleSpec::of(EnsembleKind::UniformBpBall, 20, 6);
  ball.p = 1.0;
  const Matrix b = sample(ball, rng);
  const double scale = std::sqrt(bp_ball_coordinate_variance(1.0, 6));
  for (Index i = 0; i < b.rows(); ++i) EXPECT_LE(b.row(i).lpNorm<1>() * scale, 1.0 + 1e-12);
}

TEST(Isotropy, EveryKindPasses) {
  for (auto kind : kAllKinds) {
    auto spec = EnsembleSpec::of(kind, 3, 3);
    spec.p = 1.5;
    spec.rotation_seed = 4;
    spec.row_kind = EnsembleKind::UniformBpBall;
    const auto r = check_isotropy(spec, 20000, 21);
    EXPECT_TRUE(r.passed) << to_string(kind) << " cov dev " << r.max_abs_cov_deviation
                          << " threshold " << r.threshold;
    EXPECT_EQ(r.dim, 9);
  }
}

TEST(Isotropy, DetectsWrongVariance) {
  const VectorSampler scaled = [](Rng& rng, std::span<double> out) {
    fill_law(Law::Gaussian, rng, out);
    for (auto& x : out) x *= 1.1;
  };
  EXPECT_FALSE(check_isotropy(4, scaled, 20000, 1).passed);
  const VectorSampler correlated = [](Rng& rng, std::span<double> out) {
    fill_law(Law::Gaussian, rng, out);
    out[1] = 0.8 * out[0] + 0.6 * out[1];
  };
  EXPECT_FALSE(check_isotropy(3, correlated, 20000, 1).passed);
  EXPECT_THROW(check_isotropy(3, correlated, 999, 1), std::invalid_argument);
}

TEST(EnsembleSpec, ValidationAndSymmetry) {
  EXPECT_THROW(EnsembleSpec::of(EnsembleKind::Gaussian, 0, 1).validate(), std::invalid_argument);
  auto bad = EnsembleSpec::of(EnsembleKind::UniformBpBall, 2, 2);
  bad.p = 0.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  auto rows = EnsembleSpec::of(EnsembleKind::IndependentLcRows, 2, 2);
  rows.row_kind = EnsembleKind::RotatedExponential;
  EXPECT_THROW(rows.validate(), std::invalid_argument);
  EXPECT_FALSE(EnsembleSpec::of(EnsembleKind::RotatedExponential, 2, 2).unconditional());
  EXPECT_TRUE(EnsembleSpec::of(EnsembleKind::UniformCube, 2, 2).unconditional());
}

TEST(EnsembleSpec, JsonRoundTrip) {
  for (auto kind : kAllKinds) {
    auto spec = EnsembleSpec::of(kind, 3, 7);
    spec.p = 2.5;
    spec.rotation_seed = 77;
    spec.row_kind = EnsembleKind::UniformBpBall;
    const nlohmann::json j = spec;
    const auto back = j.get<EnsembleSpec>();
    EXPECT_EQ(nlohmann::json(back), j);
    EXPECT_EQ(ensemble_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(ensemble_kind_from_string("wishart"), std::invalid_argument);
}

}  // namespace
}  // namespace chevetlab
