#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

#include <json.hpp>

#include "chevetlab/common.hpp"

namespace chevetlab {

enum class ShapeKind {
  Lp,           // B_p^dim, p in [1, inf]
  SparseHull,   // conv of m-sparse unit vectors
  SparsePolar,  // polar of the k-sparse unit vectors; gauge = top-k l2 norm
};

std::string_view to_string(ShapeKind kind);

/// A symmetric convex body usable as an operator domain or codomain.
struct BallSpec {
  int dim = 1;
  ShapeKind shape = ShapeKind::Lp;
  double param = 2.0;  // p for Lp (may be +inf), m or k for the sparse shapes

  static BallSpec lp(int dim, double p);
  static BallSpec l1(int dim) { return lp(dim, 1.0); }
  static BallSpec l2(int dim) { return lp(dim, 2.0); }
  static BallSpec linf(int dim) { return lp(dim, std::numeric_limits<double>::infinity()); }
  static BallSpec sparse_hull(int dim, int m);
  static BallSpec sparse_polar(int dim, int k);

  void validate() const;
  /// Sparsity parameter of the sparse shapes.
  int level() const { return static_cast<int>(param); }
  bool is_lp(double p) const { return shape == ShapeKind::Lp && param == p; }
  /// The polar body, again a BallSpec: B_p <-> B_{p*}, hull(U_m) <-> U_m°.
  BallSpec polar() const;

  friend bool operator==(const BallSpec&, const BallSpec&) = default;
};

/// {dim, shape, param}; an infinite p is written as the string "inf".
void to_json(nlohmann::json& j, const BallSpec& b);
void from_json(const nlohmann::json& j, BallSpec& b);

/// Minkowski functional ||x||_K.
double gauge(const Eigen::Ref<const Vector>& x, const BallSpec& K);

/// sup_{x in K} <x, y>, i.e. the gauge of K°.
double dual_norm(const Eigen::Ref<const Vector>& y, const BallSpec& K);

/// A point y of K° with <x, y> = ||x||_K.
Vector norming_functional(const Eigen::Ref<const Vector>& x, const BallSpec& K);

/// R(K) = sup_{x in K} |x|.
double circumradius(const BallSpec& K);

/// R(L°) = sup_{|x| = 1} ||x||_L.
double codomain_radius(const BallSpec& L);

/// sup_{x in K} ||x||_inf.
double sup_coordinate(const BallSpec& K);

/// Top-m Euclidean norm: sqrt of the sum of the m largest squared entries.
double top_l2(const Eigen::Ref<const Vector>& y, int m);

/// Gauge of conv(U_m) (the norm dual to top_l2).
double sparse_hull_gauge(const Eigen::Ref<const Vector>& x, int m);

enum class Exactness { Exact, LowerBound };

struct OpNormResult {
  double value = 0.0;
  Exactness exactness = Exactness::Exact;
  std::optional<Vector> witness_x;  // in K
  std::optional<Vector> witness_y;  // in L°
  bool exact() const { return exactness == Exactness::Exact; }
};

/// {value, exact, witnessX?, witnessY?}
void to_json(nlohmann::json& j, const OpNormResult& r);
void from_json(const nlohmann::json& j, OpNormResult& r);

struct OpNormOptions {
  int restarts = 32;
  std::uint64_t seed = 0x6f706e6f726dULL;
  int max_iterations = 500;
  int sign_enumeration_limit = 20;  // exact l_inf -> l_1 up to this side length
};

/// ||Gamma : K -> L|| for an n x N matrix, K.dim = N, L.dim = n. The
/// exactness flag records whether the value is certified or a lower bound.
OpNormResult op_norm(const Matrix& gamma, const BallSpec& K, const BallSpec& L,
                     const OpNormOptions& opts = {});

}  // namespace chevetlab
