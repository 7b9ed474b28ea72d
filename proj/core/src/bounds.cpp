#include "chevetlab/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace chevetlab {

namespace {

void check_shapes(const BallSpec& K, const BallSpec& L, std::int64_t trials) {
  K.validate();
  L.validate();
  if (trials < 1000) throw std::invalid_argument("chevet bounds need at least 1000 trials");
}

EstimateWithCI expected_norm(int dim, Law law, const std::function<double(const Vector&)>& norm,
                             std::int64_t trials, std::uint64_t seed, unsigned workers) {
  return monte_carlo(
      trials, seed,
      [&](Rng& rng) {
        Vector y(dim);
        fill_law(law, rng, std::span<double>(y.data(), static_cast<std::size_t>(dim)));
        return norm(y);
      },
      workers);
}

ChevetBound chevet_for_law(const BallSpec& K, const BallSpec& L, Law law, std::int64_t trials,
                           std::uint64_t seed, unsigned workers) {
  check_shapes(K, L, trials);
  ChevetBound b;
  b.radius_K = circumradius(K);
  b.radius_Lpolar = codomain_radius(L);
  b.row_norm = expected_norm(
      L.dim, law, [&](const Vector& y) { return gauge(y, L); }, trials, derive_seed(seed, 1),
      workers);
  b.col_norm = expected_norm(
      K.dim, law, [&](const Vector& y) { return dual_norm(y, K); }, trials, derive_seed(seed, 2),
      workers);
  b.termK = b.radius_K * b.row_norm.mean;
  b.termL = b.radius_Lpolar * b.col_norm.mean;
  b.total = b.termK + b.termL;
  b.se = std::hypot(b.radius_K * b.row_norm.se, b.radius_Lpolar * b.col_norm.se);
  return b;
}

}  // namespace

void to_json(nlohmann::json& j, const ChevetBound& b) {
  auto est = [](const EstimateWithCI& e) {
    return nlohmann::json{{"mean", e.mean}, {"se", e.se}, {"trials", e.trials}, {"seed", e.seed}};
  };
  j = nlohmann::json{{"radiusK", b.radius_K}, {"radiusLPolar", b.radius_Lpolar},
                     {"rowNorm", est(b.row_norm)}, {"colNorm", est(b.col_norm)},
                     {"termK", b.termK},           {"termL", b.termL},
                     {"total", b.total},           {"se", b.se}};
}

ChevetBound chevet_rhs(const BallSpec& K, const BallSpec& L, std::int64_t trials,
                       std::uint64_t seed, unsigned workers) {
  return chevet_for_law(K, L, Law::Exponential, trials, seed, workers);
}

ChevetBound gaussian_chevet_rhs(const BallSpec& K, const BallSpec& L, std::int64_t trials,
                                std::uint64_t seed, unsigned workers) {
  return chevet_for_law(K, L, Law::Gaussian, trials, seed, workers);
}

EstimateWithCI chevet_lower(const BallSpec& K, const BallSpec& L, std::int64_t trials,
                            std::uint64_t seed, unsigned workers) {
  return chevet_lower(chevet_rhs(K, L, trials, seed, workers), K, L);
}

EstimateWithCI chevet_lower(const ChevetBound& rhs, const BallSpec& K, const BallSpec& L) {
  const double a = sup_coordinate(K);
  Vector e1 = Vector::Zero(L.dim);
  e1(0) = 1.0;
  const double c = gauge(e1, L);
  EstimateWithCI out;
  out.mean = 0.5 * (a * rhs.row_norm.mean + c * rhs.col_norm.mean);
  out.se = 0.5 * std::hypot(a * rhs.row_norm.se, c * rhs.col_norm.se);
  out.trials = rhs.row_norm.trials;
  out.seed = rhs.row_norm.seed;
  return out;
}

double subm_bound(int k, int m, int n, int N) {
  if (k < 1 || k > n || m < 1 || m > N) {
    throw std::invalid_argument("subm_bound: need 1 <= k <= n and 1 <= m <= N");
  }
  return estUm_closed(m, N) + estUm_closed(k, n);
}

double estUm_closed(int l, int n) {
  if (l < 1 || l > n) throw std::invalid_argument("estUm_closed: need 1 <= l <= n");
  return std::sqrt(static_cast<double>(l)) * std::log(3.0 * n / l);
}

EstimateWithCI estUm_exact(int l, int n, std::int64_t trials, std::uint64_t seed,
                           unsigned workers) {
  if (l < 1 || l > n) throw std::invalid_argument("estUm_exact: need 1 <= l <= n");
  if (trials < 100) throw std::invalid_argument("estUm_exact: trials must be >= 100");
  return expected_norm(
      n, Law::Exponential, [l](const Vector& y) { return top_l2(y, l); }, trials, seed, workers);
}

double lonenorm_bound(int n, int N) {
  if (n < 1 || N < 1) throw std::invalid_argument("lonenorm_bound: need n, N >= 1");
  return n + std::log(static_cast<double>(N));
}

void to_json(nlohmann::json& j, const TailParams& p) {
  j = nlohmann::json{{"sigma", p.sigma}, {"sigmaPrime", p.sigma_prime}, {"a", p.a}, {"b", p.b}};
}

TailParams tail_params(const BallSpec& K, const BallSpec& L) {
  TailParams p;
  p.sigma = circumradius(K) * codomain_radius(L);
  p.sigma_prime = sup_coordinate(K) * sup_coordinate(L.polar());
  p.a = p.sigma;
  p.b = p.sigma_prime;
  return p;
}

double tail_shape(double t, const TailParams& params, double c) {
  if (t < 0.0 || c <= 0.0) throw std::invalid_argument("tail_shape: need t >= 0 and c > 0");
  const double quad = t * t / (params.sigma * params.sigma);
  const double lin = t / params.sigma_prime;
  return std::exp(-c * std::min(quad, lin));
}

void to_json(nlohmann::json& j, const RipThreshold& r) {
  j = nlohmann::json{{"theta", r.theta}, {"n", r.n},  {"N", r.N},
                     {"m", r.m},         {"branch", r.branch == RipBranch::SmallN ? "i" : "ii"},
                     {"c", r.c}};
}

RipThreshold rip_admissible_m(double theta, int n, int N, double c) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("rip_admissible_m: theta in (0,1)");
  if (n < 1 || N < 1 || !(c > 0.0)) throw std::invalid_argument("rip_admissible_m: bad n, N or c");
  RipThreshold r{theta, n, N, 0, N <= n ? RipBranch::SmallN : RipBranch::LargeN, c};
  const double l3 = std::log(3.0 / theta);
  double bound = 0.0;
  if (r.branch == RipBranch::SmallN) {
    bound = std::min<double>(N, c * theta * theta * n / (l3 * l3 * l3));
  } else {
    const double lr = std::log(3.0 * N / (theta * n));
    bound = c * theta * n / lr * std::min(1.0 / lr, theta / (l3 * l3));
    bound = std::min<double>(bound, N);
  }
  r.m = bound < 1.0 ? 0 : static_cast<long long>(std::floor(bound));
  return r;
}

double rip_failure_probability(double theta, long long m, int n, int N, double c) {
  if (m < 1 || m > N || n < 1) throw std::invalid_argument("rip_failure_probability: bad m or n");
  const double ln_n = std::log(static_cast<double>(n));
  const double first = n == 1 ? 0.0 : std::exp(-c * theta * theta * n / (ln_n * ln_n));
  const double second =
      2.0 * std::exp(-c * std::sqrt(static_cast<double>(m)) * std::log(3.0 * N / m));
  return first + second;
}

}  // namespace chevetlab
