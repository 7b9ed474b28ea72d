#include "chevetlab/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "chevetlab/montecarlo.hpp"

namespace chevetlab {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrt3 = 1.7320508075688772;

}  // namespace

double draw_exponential(Rng& rng) {
  // Inverse CDF of |E| ~ Exp(rate sqrt 2); the sign comes from the low bit.
  const std::uint64_t bits = rng();
  const double u = static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
  const double magnitude = -std::log(u) / kSqrt2;
  return (bits & 1U) ? -magnitude : magnitude;
}

void fill_law(Law law, Rng& rng, std::span<double> out) {
  if (law == Law::Exponential) {
    for (double& v : out) v = draw_exponential(rng);
  } else {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : out) v = normal(rng);
  }
}

std::string_view to_string(Law law) {
  return law == Law::Gaussian ? "gaussian" : "exponential";
}

Law law_from_string(std::string_view name) {
  if (name == "gaussian") return Law::Gaussian;
  if (name == "exponential") return Law::Exponential;
  throw std::invalid_argument("unknown law: " + std::string(name));
}

std::string_view to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::Gaussian: return "gaussian";
    case EnsembleKind::Exponential: return "exponential";
    case EnsembleKind::UniformCube: return "uniform-cube";
    case EnsembleKind::UniformBpBall: return "uniform-bp-ball";
    case EnsembleKind::RotatedExponential: return "rotated-exponential";
    case EnsembleKind::IndependentLcRows: return "independent-lc-rows";
  }
  return "unknown";
}

EnsembleKind ensemble_kind_from_string(std::string_view name) {
  for (auto k : {EnsembleKind::Gaussian, EnsembleKind::Exponential, EnsembleKind::UniformCube,
                 EnsembleKind::UniformBpBall, EnsembleKind::RotatedExponential,
                 EnsembleKind::IndependentLcRows}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown ensemble kind: " + std::string(name));
}

void EnsembleSpec::validate() const {
  if (n < 1 || N < 1) throw std::invalid_argument("EnsembleSpec: n and N must be >= 1");
  const bool uses_p = kind == EnsembleKind::UniformBpBall ||
                      (kind == EnsembleKind::IndependentLcRows &&
                       row_kind == EnsembleKind::UniformBpBall);
  if (uses_p && !(p >= 1.0 && std::isfinite(p))) {
    throw std::invalid_argument("EnsembleSpec: p must be a finite real >= 1");
  }
  if (kind == EnsembleKind::IndependentLcRows &&
      (row_kind == EnsembleKind::RotatedExponential ||
       row_kind == EnsembleKind::IndependentLcRows)) {
    throw std::invalid_argument("EnsembleSpec: row kind must be an unconditional product or ball law");
  }
}

void to_json(nlohmann::json& j, const EnsembleSpec& s) {
  j = nlohmann::json{{"kind", to_string(s.kind)}, {"n", s.n}, {"N", s.N}};
  if (s.kind == EnsembleKind::UniformBpBall ||
      (s.kind == EnsembleKind::IndependentLcRows && s.row_kind == EnsembleKind::UniformBpBall)) {
    j["p"] = s.p;
  }
  if (s.kind == EnsembleKind::RotatedExponential) j["rotationSeed"] = s.rotation_seed;
  if (s.kind == EnsembleKind::IndependentLcRows) j["rowKind"] = to_string(s.row_kind);
}

void from_json(const nlohmann::json& j, EnsembleSpec& s) {
  s = EnsembleSpec{};
  s.kind = ensemble_kind_from_string(j.at("kind").get<std::string>());
  s.n = j.at("n").get<int>();
  s.N = j.at("N").get<int>();
  if (j.contains("p")) s.p = j.at("p").get<double>();
  if (j.contains("rotationSeed")) s.rotation_seed = j.at("rotationSeed").get<std::uint64_t>();
  if (j.contains("rowKind")) s.row_kind = ensemble_kind_from_string(j.at("rowKind").get<std::string>());
  s.validate();
}

Matrix random_orthogonal(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("random_orthogonal: dim must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

double bp_ball_coordinate_variance(double p, int N) {
  // Z = X / (sum |X_i|^p + W)^{1/p} with |X_i|^p ~ Gamma(1/p), W ~ Exp(1) is
  // uniform on B_p^N, and the radial sum is independent of the direction.
  const double Np = static_cast<double>(N) / p;
  const double log_var = std::lgamma(3.0 / p) - std::lgamma(1.0 / p) + std::lgamma(1.0 + Np) -
                         std::lgamma(1.0 + Np + 2.0 / p);
  return std::exp(log_var);
}

Sampler::Sampler(const EnsembleSpec& spec) : spec_(spec) {
  spec_.validate();
  if (spec_.kind == EnsembleKind::RotatedExponential) {
    Rng rot = substream(spec_.rotation_seed, 0x524f54ULL);
    rotation_ = random_orthogonal(spec_.n, rot);
  }
  if (spec_.kind == EnsembleKind::UniformBpBall ||
      (spec_.kind == EnsembleKind::IndependentLcRows &&
       spec_.row_kind == EnsembleKind::UniformBpBall)) {
    bp_scale_ = 1.0 / std::sqrt(bp_ball_coordinate_variance(spec_.p, spec_.N));
  }
}

Sampler::Sampler(const EnsembleSpec& spec, const Matrix& rotation) : Sampler(spec) {
  if (spec_.kind != EnsembleKind::RotatedExponential) {
    throw std::invalid_argument("Sampler: explicit rotation requires rotated-exponential");
  }
  if (rotation.rows() != spec_.n || rotation.cols() != spec_.n) {
    throw std::invalid_argument("Sampler: rotation must be n x n");
  }
  rotation_ = rotation;
}

void Sampler::fill_rows(EnsembleKind kind, Rng& rng, Matrix& out) const {
  const Index n = out.rows();
  const Index N = out.cols();
  switch (kind) {
    case EnsembleKind::Gaussian: {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < N; ++j) out(i, j) = normal(rng);
      break;
    }
    case EnsembleKind::Exponential:
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < N; ++j) out(i, j) = draw_exponential(rng);
      break;
    case EnsembleKind::UniformCube: {
      std::uniform_real_distribution<double> unif(-kSqrt3, kSqrt3);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < N; ++j) out(i, j) = unif(rng);
      break;
    }
    case EnsembleKind::UniformBpBall: {
      const double p = spec_.p;
      std::gamma_distribution<double> gamma(1.0 / p, 1.0);
      std::exponential_distribution<double> expo(1.0);
      for (Index i = 0; i < n; ++i) {
        double radial = 0.0;
        for (Index j = 0; j < N; ++j) {
          const double g = gamma(rng);
          radial += g;
          const double mag = std::pow(g, 1.0 / p);
          out(i, j) = (rng() & 1U) ? -mag : mag;
        }
        radial += expo(rng);
        out.row(i) *= bp_scale_ / std::pow(radial, 1.0 / p);
      }
      break;
    }
    default:
      throw std::logic_error("Sampler: unsupported row kind");
  }
}

void Sampler::fill(Rng& rng, Matrix& out) const {
  out.resize(spec_.n, spec_.N);
  switch (spec_.kind) {
    case EnsembleKind::RotatedExponential: {
      Matrix g(spec_.n, spec_.N);
      fill_rows(EnsembleKind::Exponential, rng, g);
      out.noalias() = rotation_ * g;
      break;
    }
    case EnsembleKind::IndependentLcRows:
      fill_rows(spec_.row_kind, rng, out);
      break;
    default:
      fill_rows(spec_.kind, rng, out);
  }
}

Matrix Sampler::operator()(Rng& rng) const {
  Matrix out;
  fill(rng, out);
  return out;
}

Matrix sample(const EnsembleSpec& spec, Rng& rng) { return Sampler(spec)(rng); }

IsotropyReport check_isotropy(const EnsembleSpec& spec, std::int64_t trials,
                              std::uint64_t seed) {
  const Sampler sampler(spec);
  Matrix buf;
  return check_isotropy(
      spec.dim(),
      [&](Rng& rng, std::span<double> out) {
        sampler.fill(rng, buf);
        std::copy(buf.data(), buf.data() + buf.size(), out.begin());
      },
      trials, seed);
}

IsotropyReport check_isotropy(int dim, const VectorSampler& draw, std::int64_t trials,
                              std::uint64_t seed) {
  if (trials < 1000) throw std::invalid_argument("check_isotropy: trials must be >= 1000");
  if (dim < 1) throw std::invalid_argument("check_isotropy: dim must be >= 1");
  const Index d = dim;
  Vector sum = Vector::Zero(d);
  Vector sumsq = Vector::Zero(d);
  Matrix m2 = Matrix::Zero(d, d);  // sum x_i x_j
  Matrix m4 = Matrix::Zero(d, d);  // sum (x_i x_j)^2
  Vector x(d);
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(t));
    draw(rng, std::span<double>(x.data(), static_cast<std::size_t>(d)));
    sum += x;
    sumsq += x.cwiseAbs2();
    for (Index j = 0; j < d; ++j) {
      for (Index i = 0; i <= j; ++i) {
        const double prod = x(i) * x(j);
        m2(i, j) += prod;
        m4(i, j) += prod * prod;
      }
    }
  }
  const double T = static_cast<double>(trials);
  const Vector mean = sum / T;
  IsotropyReport rep;
  rep.dim = dim;
  rep.trials = trials;
  rep.max_abs_mean = mean.cwiseAbs().maxCoeff();
  for (Index i = 0; i < d; ++i) {
    const double var = sumsq(i) / T - mean(i) * mean(i);
    rep.mean_scale = std::max(rep.mean_scale, std::sqrt(std::max(var, 0.0)));
  }
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double moment = m2(i, j) / T;
      const double cov = moment - mean(i) * mean(j);
      const double target = i == j ? 1.0 : 0.0;
      rep.max_abs_cov_deviation = std::max(rep.max_abs_cov_deviation, std::abs(cov - target));
      const double var_prod = m4(i, j) / T - moment * moment;
      rep.se_scale = std::max(rep.se_scale, std::sqrt(std::max(var_prod, 0.0)));
    }
  }
  const double root = std::sqrt(T);
  rep.threshold = 4.0 * rep.se_scale / root;
  rep.passed = rep.max_abs_cov_deviation <= rep.threshold &&
               rep.max_abs_mean <= 4.0 * rep.mean_scale / root;
  return rep;
}

}  // namespace chevetlab
