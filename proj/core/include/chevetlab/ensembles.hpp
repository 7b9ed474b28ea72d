#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "chevetlab/common.hpp"
#include "chevetlab/rng.hpp"

namespace chevetlab {

/// Laws of the scalar variables driving the processes: standard Gaussian or
/// symmetric exponential with variance one (density 2^{-1/2} e^{-sqrt(2)|x|}).
enum class Law { Gaussian, Exponential };

double draw_exponential(Rng& rng);
void fill_law(Law law, Rng& rng, std::span<double> out);
std::string_view to_string(Law law);
Law law_from_string(std::string_view name);

enum class EnsembleKind {
  Gaussian,
  Exponential,
  UniformCube,         // entries uniform on [-sqrt 3, sqrt 3]
  UniformBpBall,       // rows uniform in a rescaled B_p^N
  RotatedExponential,  // U * Gamma with U Haar, fixed by rotation_seed
  IndependentLcRows,   // rows drawn independently from row_kind
};

std::string_view to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(std::string_view name);

/// Declarative description of a random n x N matrix law (N = 1 is a vector).
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::Exponential;
  int n = 1;
  int N = 1;
  double p = 2.0;                    // UniformBpBall, or rows of that kind
  std::uint64_t rotation_seed = 0;   // RotatedExponential
  EnsembleKind row_kind = EnsembleKind::Exponential;  // IndependentLcRows

  /// Throws std::invalid_argument on n, N < 1, p < 1, or an invalid row kind.
  void validate() const;
  /// Whether the law is invariant under entrywise sign flips.
  bool unconditional() const { return kind != EnsembleKind::RotatedExponential; }
  int dim() const { return n * N; }

  static EnsembleSpec of(EnsembleKind kind, int n, int N) {
    EnsembleSpec s;
    s.kind = kind;
    s.n = n;
    s.N = N;
    return s;
  }
};

void to_json(nlohmann::json& j, const EnsembleSpec& s);
void from_json(const nlohmann::json& j, EnsembleSpec& s);

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// diagonal of R made positive.
Matrix random_orthogonal(int dim, Rng& rng);

/// Coordinate variance of the uniform distribution on B_p^N.
double bp_ball_coordinate_variance(double p, int N);

/// Draws matrices from an EnsembleSpec. Construction precomputes anything
/// that is fixed by the spec (the rotation, the variance calibration), so a
/// Sampler is immutable and may be shared across threads.
class Sampler {
 public:
  explicit Sampler(const EnsembleSpec& spec);
  /// Uses `rotation` in place of the one derived from rotation_seed.
  Sampler(const EnsembleSpec& spec, const Matrix& rotation);

  Matrix operator()(Rng& rng) const;
  void fill(Rng& rng, Matrix& out) const;

  const EnsembleSpec& spec() const { return spec_; }
  const Matrix& rotation() const { return rotation_; }

 private:
  void fill_rows(EnsembleKind kind, Rng& rng, Matrix& out) const;

  EnsembleSpec spec_;
  Matrix rotation_;
  double bp_scale_ = 1.0;
};

Matrix sample(const EnsembleSpec& spec, Rng& rng);

struct IsotropyReport {
  int dim = 0;
  double max_abs_mean = 0.0;
  double max_abs_cov_deviation = 0.0;
  std::int64_t trials = 0;
  double se_scale = 0.0;    // max empirical sd of X_i X_j over entry pairs
  double mean_scale = 0.0;  // max empirical sd of X_i
  double threshold = 0.0;   // 4 * se_scale / sqrt(trials)
  bool passed = false;
};

/// Draws one flattened sample into `out` (length = dim).
using VectorSampler = std::function<void(Rng&, std::span<double>)>;

/// Empirical mean and covariance audit of a flattened (column-major) sample.
/// Requires trials >= 1000.
IsotropyReport check_isotropy(const EnsembleSpec& spec, std::int64_t trials,
                              std::uint64_t seed);
IsotropyReport check_isotropy(int dim, const VectorSampler& draw, std::int64_t trials,
                              std::uint64_t seed);

}  // namespace chevetlab
