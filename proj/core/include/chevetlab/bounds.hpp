#pragma once

#include <cstdint>

#include <json.hpp>

#include "chevetlab/ensembles.hpp"
#include "chevetlab/geometry.hpp"
#include "chevetlab/montecarlo.hpp"

namespace chevetlab {

/// R(K) E||Y_n||_L + R(L°) E||Y_N||_{K°} for a random vector Y with i.i.d.
/// entries of the given law. All absolute constants are omitted.
struct ChevetBound {
  double radius_K = 0.0;      // R(K)
  double radius_Lpolar = 0.0;  // R(L°)
  EstimateWithCI row_norm;    // E||Y_n||_L
  EstimateWithCI col_norm;    // E||Y_N||_{K°}
  double termK = 0.0;
  double termL = 0.0;
  double total = 0.0;
  double se = 0.0;
};

void to_json(nlohmann::json& j, const ChevetBound& b);

/// Exponential entries. Requires K.dim = N, L.dim = n, trials >= 1000.
ChevetBound chevet_rhs(const BallSpec& K, const BallSpec& L, std::int64_t trials,
                       std::uint64_t seed, unsigned workers = default_workers());

/// Gaussian entries.
ChevetBound gaussian_chevet_rhs(const BallSpec& K, const BallSpec& L, std::int64_t trials,
                                std::uint64_t seed, unsigned workers = default_workers());

/// 1/2 (max_i ||e_i||_{K°} E||Y_n||_L + max_i ||e_i||_L E||Y_N||_{K°}), exponential Y.
EstimateWithCI chevet_lower(const BallSpec& K, const BallSpec& L, std::int64_t trials,
                            std::uint64_t seed, unsigned workers = default_workers());

/// The same lower bound, reusing the expectations of an exponential ChevetBound.
EstimateWithCI chevet_lower(const ChevetBound& rhs, const BallSpec& K, const BallSpec& L);

/// sqrt(m) ln(3N/m) + sqrt(k) ln(3n/k).
double subm_bound(int k, int m, int n, int N);

/// sqrt(l) ln(3n/l).
double estUm_closed(int l, int n);

/// E of the top-l Euclidean norm of an exponential vector in R^n.
EstimateWithCI estUm_exact(int l, int n, std::int64_t trials, std::uint64_t seed,
                           unsigned workers = default_workers());

/// n + ln N.
double lonenorm_bound(int n, int N);

struct TailParams {
  double sigma = 0.0;        // R(K) R(L°)
  double sigma_prime = 0.0;  // sup_K ||x||_inf * sup_{L°} ||y||_inf
  double a = 0.0;            // sup_{z in K x L°} |z|
  double b = 0.0;            // sup_{z in K x L°} ||z||_inf
};

void to_json(nlohmann::json& j, const TailParams& p);

TailParams tail_params(const BallSpec& K, const BallSpec& L);

/// exp(-c min(t^2 / sigma^2, t / sigma')).
double tail_shape(double t, const TailParams& params, double c);

enum class RipBranch { SmallN, LargeN };

struct RipThreshold {
  double theta = 0.0;
  int n = 0;
  int N = 0;
  long long m = 0;
  RipBranch branch = RipBranch::SmallN;
  double c = 0.0;
};

void to_json(nlohmann::json& j, const RipThreshold& r);

/// Largest admissible sparsity with threshold constant c. N <= n uses
/// min(N, c theta^2 n / ln^3(3/theta)); otherwise
/// c theta n / ln(3N/(theta n)) * min(1 / ln(3N/(theta n)), theta / ln^2(3/theta)).
RipThreshold rip_admissible_m(double theta, int n, int N, double c);

/// exp(-c theta^2 n / ln^2 n) + 2 exp(-c sqrt(m) ln(3N/m)), with its own c.
double rip_failure_probability(double theta, long long m, int n, int N, double c);

}  // namespace chevetlab
