#include "chevetlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "chevetlab/linalg.hpp"
#include "chevetlab/rng.hpp"
#include "chevetlab/submatrix.hpp"

namespace chevetlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

double lp_norm(const Eigen::Ref<const Vector>& x, double p) {
  if (x.size() == 0) return 0.0;
  if (p == 1.0) return x.lpNorm<1>();
  if (p == 2.0) return x.norm();
  if (std::isinf(p)) return x.lpNorm<Eigen::Infinity>();
  const double scale = x.lpNorm<Eigen::Infinity>();
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)) / scale, p);
  return scale * std::pow(s, 1.0 / p);
}

Vector lp_norming(const Eigen::Ref<const Vector>& x, double p) {
  Vector y = Vector::Zero(x.size());
  const double nrm = lp_norm(x, p);
  if (nrm == 0.0) return y;
  if (p == 1.0) {
    for (Index i = 0; i < x.size(); ++i) y(i) = (x(i) > 0) - (x(i) < 0);
  } else if (std::isinf(p)) {
    Index imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    y(imax) = x(imax) > 0 ? 1.0 : -1.0;
  } else {
    for (Index i = 0; i < x.size(); ++i) {
      const double a = std::abs(x(i)) / nrm;
      y(i) = std::copysign(std::pow(a, p - 1.0), x(i));
      if (x(i) == 0.0) y(i) = 0.0;
    }
  }
  return y;
}

/// Indices sorted by decreasing |x_i|, ties by index.
std::vector<Index> order_by_magnitude(const Eigen::Ref<const Vector>& x) {
  std::vector<Index> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return std::abs(x(a)) > std::abs(x(b)); });
  return idx;
}

/// The k-support decomposition of conv(U_m)'s gauge: the `head` largest
/// entries enter squared, the rest are averaged at level tail_level.
struct HullSplit {
  double norm = 0.0;
  std::size_t head = 0;
  double tail_level = 0.0;
};

HullSplit hull_split(const std::vector<double>& z, int m) {
  // z sorted decreasing, nonnegative.
  const std::size_t d = z.size();
  HullSplit out;
  if (static_cast<std::size_t>(m) >= d) {
    double s = 0.0;
    for (double v : z) s += v * v;
    out.norm = std::sqrt(s);
    out.head = d;
    return out;
  }
  std::vector<double> suffix(d + 1, 0.0);
  for (std::size_t i = d; i-- > 0;) suffix[i] = suffix[i + 1] + z[i];
  std::vector<double> prefix_sq(d + 1, 0.0);
  for (std::size_t i = 0; i < d; ++i) prefix_sq[i + 1] = prefix_sq[i] + z[i] * z[i];

  auto evaluate = [&](int r) {
    const std::size_t h = static_cast<std::size_t>(m - r - 1);
    const double level = suffix[h] / (r + 1);
    return HullSplit{std::sqrt(prefix_sq[h] + suffix[h] * suffix[h] / (r + 1)), h, level};
  };
  constexpr double tol = 1e-12;
  for (int r = 0; r < m; ++r) {
    const auto cand = evaluate(r);
    const std::size_t h = cand.head;
    const bool upper = h == 0 || z[h - 1] >= cand.tail_level * (1.0 - tol);
    const bool lower = cand.tail_level >= z[h] * (1.0 - tol);
    if (upper && lower) return cand;
  }
  // Rounding left no consistent split; the norm is the largest candidate
  // value over the consistent-by-construction family.
  HullSplit best = evaluate(0);
  for (int r = 1; r < m; ++r) {
    const auto cand = evaluate(r);
    if (cand.norm > best.norm) best = cand;
  }
  return best;
}

std::vector<double> sorted_magnitudes(const Eigen::Ref<const Vector>& x,
                                      const std::vector<Index>& order) {
  std::vector<double> z(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) z[i] = std::abs(x(order[i]));
  return z;
}

Vector top_l2_norming(const Eigen::Ref<const Vector>& x, int k) {
  Vector y = Vector::Zero(x.size());
  const double nrm = top_l2(x, k);
  if (nrm == 0.0) return y;
  const auto order = order_by_magnitude(x);
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
  for (std::size_t i = 0; i < take; ++i) y(order[i]) = x(order[i]) / nrm;
  return y;
}

Vector hull_norming(const Eigen::Ref<const Vector>& x, int m) {
  Vector y = Vector::Zero(x.size());
  const auto order = order_by_magnitude(x);
  const auto z = sorted_magnitudes(x, order);
  const auto split = hull_split(z, m);
  if (split.norm == 0.0) return y;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Index j = order[i];
    if (x(j) == 0.0) continue;
    const double mag = i < split.head ? z[i] : split.tail_level;
    y(j) = std::copysign(mag / split.norm, x(j));
  }
  return y;
}

void check_dim(const Eigen::Ref<const Vector>& x, const BallSpec& K, const char* who) {
  if (x.size() != K.dim) {
    throw std::invalid_argument(std::string(who) + ": dimension mismatch (vector " +
                                std::to_string(x.size()) + ", body " + std::to_string(K.dim) +
                                ")");
  }
}

}  // namespace

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Lp: return "lp";
    case ShapeKind::SparseHull: return "sparse-hull";
    case ShapeKind::SparsePolar: return "sparse-polar";
  }
  return "unknown";
}

BallSpec BallSpec::lp(int dim, double p) {
  BallSpec b{dim, ShapeKind::Lp, p};
  b.validate();
  return b;
}

BallSpec BallSpec::sparse_hull(int dim, int m) {
  BallSpec b{dim, ShapeKind::SparseHull, static_cast<double>(m)};
  b.validate();
  return b;
}

BallSpec BallSpec::sparse_polar(int dim, int k) {
  BallSpec b{dim, ShapeKind::SparsePolar, static_cast<double>(k)};
  b.validate();
  return b;
}

void BallSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("BallSpec: dim must be >= 1");
  if (shape == ShapeKind::Lp) {
    if (!(param >= 1.0)) throw std::invalid_argument("BallSpec: p must be >= 1");
    return;
  }
  if (param != std::floor(param) || param < 1.0 || param > dim) {
    throw std::invalid_argument("BallSpec: sparsity must be an integer in [1, dim]");
  }
}

BallSpec BallSpec::polar() const {
  switch (shape) {
    case ShapeKind::Lp: return BallSpec{dim, ShapeKind::Lp, conjugate_exponent(param)};
    case ShapeKind::SparseHull: return BallSpec{dim, ShapeKind::SparsePolar, param};
    case ShapeKind::SparsePolar: return BallSpec{dim, ShapeKind::SparseHull, param};
  }
  return *this;
}

void to_json(nlohmann::json& j, const BallSpec& b) {
  j = nlohmann::json{{"dim", b.dim}, {"shape", to_string(b.shape)}};
  if (std::isinf(b.param)) {
    j["param"] = "inf";
  } else if (b.shape == ShapeKind::Lp) {
    j["param"] = b.param;
  } else {
    j["param"] = b.level();
  }
}

void from_json(const nlohmann::json& j, BallSpec& b) {
  b.dim = j.at("dim").get<int>();
  const auto shape = j.at("shape").get<std::string>();
  if (shape == "lp") {
    b.shape = ShapeKind::Lp;
  } else if (shape == "sparse-hull") {
    b.shape = ShapeKind::SparseHull;
  } else if (shape == "sparse-polar") {
    b.shape = ShapeKind::SparsePolar;
  } else {
    throw std::invalid_argument("BallSpec: unknown shape " + shape);
  }
  const auto& param = j.at("param");
  b.param = param.is_string() && param.get<std::string>() == "inf" ? kInf : param.get<double>();
  b.validate();
}

double top_l2(const Eigen::Ref<const Vector>& y, int m) {
  const Index d = y.size();
  if (m >= d) return y.norm();
  std::vector<double> sq(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) sq[static_cast<std::size_t>(i)] = y(i) * y(i);
  std::nth_element(sq.begin(), sq.begin() + m, sq.end(), std::greater<>());
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += sq[static_cast<std::size_t>(i)];
  return std::sqrt(s);
}

double sparse_hull_gauge(const Eigen::Ref<const Vector>& x, int m) {
  const auto order = order_by_magnitude(x);
  return hull_split(sorted_magnitudes(x, order), m).norm;
}

double gauge(const Eigen::Ref<const Vector>& x, const BallSpec& K) {
  check_dim(x, K, "gauge");
  switch (K.shape) {
    case ShapeKind::Lp: return lp_norm(x, K.param);
    case ShapeKind::SparseHull: return sparse_hull_gauge(x, K.level());
    case ShapeKind::SparsePolar: return top_l2(x, K.level());
  }
  return 0.0;
}

double dual_norm(const Eigen::Ref<const Vector>& y, const BallSpec& K) {
  check_dim(y, K, "dual_norm");
  return gauge(y, K.polar());
}

Vector norming_functional(const Eigen::Ref<const Vector>& x, const BallSpec& K) {
  check_dim(x, K, "norming_functional");
  switch (K.shape) {
    case ShapeKind::Lp: return lp_norming(x, K.param);
    case ShapeKind::SparseHull: return hull_norming(x, K.level());
    case ShapeKind::SparsePolar: return top_l2_norming(x, K.level());
  }
  return Vector::Zero(x.size());
}

double circumradius(const BallSpec& K) {
  const double d = K.dim;
  switch (K.shape) {
    case ShapeKind::Lp:
      if (K.param <= 2.0) return 1.0;
      if (std::isinf(K.param)) return std::sqrt(d);
      return std::pow(d, 0.5 - 1.0 / K.param);
    case ShapeKind::SparseHull: return 1.0;
    case ShapeKind::SparsePolar: return std::sqrt(d / std::min<double>(K.level(), d));
  }
  return 0.0;
}

double codomain_radius(const BallSpec& L) { return circumradius(L.polar()); }

double sup_coordinate(const BallSpec& K) {
  Vector e = Vector::Zero(K.dim);
  e(0) = 1.0;
  return dual_norm(e, K);
}

void to_json(nlohmann::json& j, const OpNormResult& r) {
  j = nlohmann::json{{"value", r.value}, {"exact", r.exact()}};
  auto as_array = [](const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  if (r.witness_x) j["witnessX"] = as_array(*r.witness_x);
  if (r.witness_y) j["witnessY"] = as_array(*r.witness_y);
}

void from_json(const nlohmann::json& j, OpNormResult& r) {
  r = OpNormResult{};
  r.value = j.at("value").get<double>();
  r.exactness = j.at("exact").get<bool>() ? Exactness::Exact : Exactness::LowerBound;
  auto as_vector = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
  };
  if (j.contains("witnessX")) r.witness_x = as_vector(j.at("witnessX"));
  if (j.contains("witnessY")) r.witness_y = as_vector(j.at("witnessY"));
}

namespace {

OpNormResult l1_domain(const Matrix& g, const BallSpec& L) {
  OpNormResult res;
  Index best = 0;
  double best_val = -1.0;
  for (Index j = 0; j < g.cols(); ++j) {
    const double v = gauge(g.col(j), L);
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  res.value = best_val;
  Vector x = Vector::Zero(g.cols());
  x(best) = 1.0;
  res.witness_x = x;
  res.witness_y = norming_functional(g.col(best), L);
  return res;
}

OpNormResult linf_codomain(const Matrix& g, const BallSpec& K) {
  OpNormResult res;
  Index best = 0;
  double best_val = -1.0;
  const BallSpec Kpolar = K.polar();
  for (Index i = 0; i < g.rows(); ++i) {
    const Vector row = g.row(i).transpose();
    const double v = gauge(row, Kpolar);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  res.value = best_val;
  Vector y = Vector::Zero(g.rows());
  y(best) = 1.0;
  res.witness_y = y;
  res.witness_x = norming_functional(g.row(best).transpose(), Kpolar);
  return res;
}

/// max over sign vectors s in {+-1}^cols of ||g s||_1, with s(0) = +1.
OpNormResult enumerate_signs(const Matrix& g) {
  const Index cols = g.cols();
  Vector s = Vector::Ones(cols);
  Vector v = g * s;
  Vector best_s = s;
  double best = v.lpNorm<1>();
  const std::uint64_t steps = cols > 1 ? (std::uint64_t{1} << (cols - 1)) : 1;
  for (std::uint64_t t = 1; t < steps; ++t) {
    // Gray code: flip coordinate 1 + ctz(t).
    const int bit = 1 + __builtin_ctzll(t);
    s(bit) = -s(bit);
    v += (2.0 * s(bit)) * g.col(bit);
    const double val = v.lpNorm<1>();
    if (val > best) {
      best = val;
      best_s = s;
    }
  }
  OpNormResult res;
  const Vector gv = g * best_s;
  res.value = gv.lpNorm<1>();
  res.witness_x = best_s;
  res.witness_y = lp_norming(gv, 1.0);
  return res;
}

OpNormResult alternating_maximization(const Matrix& g, const BallSpec& K, const BallSpec& L,
                                      const OpNormOptions& opts) {
  const BallSpec Kpolar = K.polar();
  OpNormResult best;
  best.exactness = Exactness::LowerBound;
  best.value = -1.0;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Vector x0;
    if (r == 0) {
      x0 = Vector::Ones(g.cols());
    } else {
      Rng rng = substream(opts.seed, static_cast<std::uint64_t>(r));
      std::normal_distribution<double> normal;
      x0.resize(g.cols());
      for (Index i = 0; i < x0.size(); ++i) x0(i) = normal(rng);
    }
    const double g0 = gauge(x0, K);
    if (g0 == 0.0) continue;
    Vector x = x0 / g0;
    Vector y = norming_functional(g * x, L);
    double val = y.dot(g * x);
    for (int it = 0; it < opts.max_iterations; ++it) {
      const Vector w = g.transpose() * y;
      const Vector x_new = norming_functional(w, Kpolar);
      const Vector gx = g * x_new;
      const Vector y_new = norming_functional(gx, L);
      const double val_new = y_new.dot(gx);
      const bool improved = val_new > val * (1.0 + 1e-13);
      if (val_new >= val) {
        x = x_new;
        y = y_new;
        val = val_new;
      }
      if (!improved) break;
    }
    if (val > best.value) {
      best.value = val;
      best.witness_x = x;
      best.witness_y = y;
    }
  }
  best.value = std::max(best.value, 0.0);
  return best;
}

bool is_euclidean_like_domain(const BallSpec& K) {
  return K.is_lp(2.0) || K.shape == ShapeKind::SparseHull;
}

bool is_euclidean_like_codomain(const BallSpec& L) {
  return L.is_lp(2.0) || L.shape == ShapeKind::SparsePolar;
}

}  // namespace

OpNormResult op_norm(const Matrix& gamma, const BallSpec& K, const BallSpec& L,
                     const OpNormOptions& opts) {
  K.validate();
  L.validate();
  if (K.dim != gamma.cols() || L.dim != gamma.rows()) {
    throw std::invalid_argument("op_norm: need K.dim = cols and L.dim = rows");
  }
  if (K.is_lp(1.0)) return l1_domain(gamma, L);
  if (std::isinf(L.param) && L.shape == ShapeKind::Lp) return linf_codomain(gamma, K);

  if (is_euclidean_like_domain(K) && is_euclidean_like_codomain(L)) {
    const int m = K.is_lp(2.0) ? K.dim : K.level();
    const int k = L.is_lp(2.0) ? L.dim : L.level();
    const int n = static_cast<int>(gamma.rows());
    const int N = static_cast<int>(gamma.cols());
    const auto mode = gamma_km_exact_feasible(n, N, k, m) ? SearchMode::Exact
                                                           : SearchMode::Heuristic;
    SearchOptions search;
    search.workers = 1;
    return gamma_km(gamma, k, m, mode, search).norm;
  }

  if (std::isinf(K.param) && K.shape == ShapeKind::Lp && L.is_lp(1.0)) {
    const Index side = std::min(gamma.rows(), gamma.cols());
    if (side <= opts.sign_enumeration_limit) {
      if (gamma.cols() <= gamma.rows()) return enumerate_signs(gamma);
      OpNormResult t = enumerate_signs(gamma.transpose());
      std::swap(t.witness_x, t.witness_y);
      return t;
    }
  }
  return alternating_maximization(gamma, K, L, opts);
}

}  // namespace chevetlab
