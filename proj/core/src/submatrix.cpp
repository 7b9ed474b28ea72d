#include "chevetlab/submatrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "chevetlab/linalg.hpp"
#include "chevetlab/rng.hpp"

namespace chevetlab {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t acc = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t g = std::gcd(acc, static_cast<std::uint64_t>(i));
    const std::uint64_t factor = static_cast<std::uint64_t>(n - k + i) / (static_cast<std::uint64_t>(i) / g);
    if (__builtin_mul_overflow(acc / g, factor, &acc)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return acc;
}

void to_json(nlohmann::json& j, const SupportPair& s) {
  auto one_based = [](const std::vector<int>& v) {
    std::vector<int> out(v);
    for (int& x : out) ++x;
    return out;
  };
  j = nlohmann::json{{"rows", one_based(s.rows)}, {"cols", one_based(s.cols)}};
}

void from_json(const nlohmann::json& j, SupportPair& s) {
  s.rows = j.at("rows").get<std::vector<int>>();
  s.cols = j.at("cols").get<std::vector<int>>();
  for (int& x : s.rows) --x;
  for (int& x : s.cols) --x;
}

void to_json(nlohmann::json& j, const RicResult& r) {
  std::vector<int> support(r.support);
  for (int& x : support) ++x;
  j = nlohmann::json{{"delta", r.delta},
                     {"support", support},
                     {"x", std::vector<double>(r.x.data(), r.x.data() + r.x.size())},
                     {"exact", r.exactness == Exactness::Exact}};
}

namespace {

bool saturating_product_within(std::uint64_t a, std::uint64_t b, std::uint64_t limit) {
  if (a == 0 || b == 0) return true;
  return a <= limit / b;
}

/// Advances a sorted k-combination of {0..n-1} in lexicographic order.
bool next_combination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++c[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

std::vector<int> first_combination(int k) {
  std::vector<int> c(static_cast<std::size_t>(k));
  std::iota(c.begin(), c.end(), 0);
  return c;
}

/// Indices of the `count` largest |v_i|, ties to the smaller index, sorted.
std::vector<int> top_indices(const Vector& v, int count) {
  std::vector<int> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return std::abs(v(a)) > std::abs(v(b)); });
  idx.resize(static_cast<std::size_t>(count));
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<int> random_subset(int n, int k, Rng& rng) {
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
  }
  all.resize(static_cast<std::size_t>(k));
  std::sort(all.begin(), all.end());
  return all;
}

GammaKmResult finish(const Matrix& gamma, SupportPair support, Exactness exactness) {
  Matrix sub;
  gather(gamma, support.rows, support.cols, sub);
  const auto top = top_singular(sub);
  GammaKmResult res;
  res.norm.value = top.value;
  res.norm.exactness = exactness;
  Vector x = Vector::Zero(gamma.cols());
  Vector y = Vector::Zero(gamma.rows());
  for (std::size_t i = 0; i < support.cols.size(); ++i) {
    x(support.cols[i]) = top.right(static_cast<Index>(i));
  }
  for (std::size_t i = 0; i < support.rows.size(); ++i) {
    y(support.rows[i]) = top.left(static_cast<Index>(i));
  }
  res.norm.witness_x = std::move(x);
  res.norm.witness_y = std::move(y);
  res.support = std::move(support);
  return res;
}

/// Gamma_{1,m}: the best row, restricted to its m largest entries.
SupportPair single_row_support(const Matrix& gamma, int m) {
  double best = -1.0;
  int best_row = 0;
  for (Index i = 0; i < gamma.rows(); ++i) {
    const double v = top_l2(gamma.row(i).transpose(), m);
    if (v > best) {
      best = v;
      best_row = static_cast<int>(i);
    }
  }
  return {{best_row}, top_indices(gamma.row(best_row).transpose(), m)};
}

SupportPair exact_enumeration(const Matrix& gamma, int k, int m, unsigned workers) {
  const int n = static_cast<int>(gamma.rows());
  const int N = static_cast<int>(gamma.cols());
  std::vector<std::vector<int>> row_sets;
  row_sets.reserve(static_cast<std::size_t>(binomial(n, k)));
  for (auto c = first_combination(k);;) {
    row_sets.push_back(c);
    if (!next_combination(c, n)) break;
  }
  std::vector<double> best_value(row_sets.size(), -1.0);
  std::vector<std::vector<int>> best_cols(row_sets.size());
  parallel_for(row_sets.size(), workers, [&](std::size_t r) {
    Matrix rows_block(k, N);
    for (int i = 0; i < k; ++i) rows_block.row(i) = gamma.row(row_sets[r][static_cast<std::size_t>(i)]);
    Matrix sub(k, m);
    for (auto c = first_combination(m);;) {
      for (int j = 0; j < m; ++j) sub.col(j) = rows_block.col(c[static_cast<std::size_t>(j)]);
      const double v = spectral_norm(sub);
      if (v > best_value[r]) {
        best_value[r] = v;
        best_cols[r] = c;
      }
      if (!next_combination(c, N)) break;
    }
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < row_sets.size(); ++r) {
    if (best_value[r] > best_value[best]) best = r;
  }
  return {row_sets[best], best_cols[best]};
}

double support_value(const Matrix& gamma, const std::vector<int>& rows,
                     const std::vector<int>& cols, Matrix& buffer) {
  gather(gamma, rows, cols, buffer);
  return spectral_norm(buffer);
}

/// Alternating truncated power steps: refit each side to the singular vector
/// of the other, keeping the largest-energy coordinates.
void truncated_power(const Matrix& gamma, int k, int m, SupportPair& s) {
  Matrix sub;
  for (int it = 0; it < 50; ++it) {
    gather(gamma, s.rows, s.cols, sub);
    const auto top = top_singular(sub);
    Vector u = Vector::Zero(gamma.rows());
    for (std::size_t i = 0; i < s.rows.size(); ++i) u(s.rows[i]) = top.left(static_cast<Index>(i));
    const std::vector<int> cols = top_indices(gamma.transpose() * u, m);
    Matrix wide;
    const std::vector<int> all_rows = [&] {
      std::vector<int> r(static_cast<std::size_t>(gamma.rows()));
      std::iota(r.begin(), r.end(), 0);
      return r;
    }();
    gather(gamma, all_rows, cols, wide);
    gather(gamma, s.rows, cols, sub);
    const auto top2 = top_singular(sub);
    const std::vector<int> rows = top_indices(wide * top2.right, k);
    if (rows == s.rows && cols == s.cols) return;
    const double before = support_value(gamma, s.rows, s.cols, sub);
    const double after = support_value(gamma, rows, cols, sub);
    if (!(after > before)) return;
    s.rows = rows;
    s.cols = cols;
  }
}

/// Best-improvement single swaps on rows and columns until no swap helps.
double swap_search(const Matrix& gamma, SupportPair& s) {
  const int n = static_cast<int>(gamma.rows());
  const int N = static_cast<int>(gamma.cols());
  Matrix buffer;
  double current = support_value(gamma, s.rows, s.cols, buffer);
  auto improve_side = [&](std::vector<int>& side, int extent, bool is_rows) {
    std::vector<char> inside(static_cast<std::size_t>(extent), 0);
    for (int v : side) inside[static_cast<std::size_t>(v)] = 1;
    double best = current;
    std::vector<int> best_side;
    for (std::size_t pos = 0; pos < side.size(); ++pos) {
      for (int cand = 0; cand < extent; ++cand) {
        if (inside[static_cast<std::size_t>(cand)]) continue;
        std::vector<int> trial = side;
        trial[pos] = cand;
        std::sort(trial.begin(), trial.end());
        const double v = is_rows ? support_value(gamma, trial, s.cols, buffer)
                                 : support_value(gamma, s.rows, trial, buffer);
        if (v > best * (1.0 + 1e-12)) {
          best = v;
          best_side = std::move(trial);
        }
      }
    }
    if (best_side.empty()) return false;
    side = std::move(best_side);
    current = best;
    return true;
  };
  for (;;) {
    const bool rows_moved = improve_side(s.rows, n, true);
    const bool cols_moved = improve_side(s.cols, N, false);
    if (!rows_moved && !cols_moved) break;
  }
  return current;
}

/// Grows a support from a single entry, adding whichever row or column
/// raises the spectral norm most until the support has k rows and m columns.
SupportPair greedy_growth(const Matrix& gamma, int k, int m, int row, int col) {
  const int n = static_cast<int>(gamma.rows());
  const int N = static_cast<int>(gamma.cols());
  SupportPair s{{row}, {col}};
  Matrix buffer;
  while (static_cast<int>(s.rows.size()) < k || static_cast<int>(s.cols.size()) < m) {
    double best = -1.0;
    SupportPair next;
    auto consider = [&](std::vector<int> rows, std::vector<int> cols) {
      const double v = support_value(gamma, rows, cols, buffer);
      if (v > best) {
        best = v;
        next = {std::move(rows), std::move(cols)};
      }
    };
    if (static_cast<int>(s.rows.size()) < k) {
      for (int i = 0; i < n; ++i) {
        if (std::binary_search(s.rows.begin(), s.rows.end(), i)) continue;
        auto rows = s.rows;
        rows.insert(std::lower_bound(rows.begin(), rows.end(), i), i);
        consider(std::move(rows), s.cols);
      }
    }
    if (static_cast<int>(s.cols.size()) < m) {
      for (int j = 0; j < N; ++j) {
        if (std::binary_search(s.cols.begin(), s.cols.end(), j)) continue;
        auto cols = s.cols;
        cols.insert(std::lower_bound(cols.begin(), cols.end(), j), j);
        consider(s.rows, std::move(cols));
      }
    }
    s = std::move(next);
  }
  return s;
}

/// Restart 0 starts from the leading singular vectors of the whole matrix;
/// restart r > 0 grows greedily from the r-th largest entry.
SupportPair heuristic_search(const Matrix& gamma, int k, int m, const SearchOptions& opts) {
  const int restarts = std::max(1, opts.restarts);
  std::vector<Index> entries(static_cast<std::size_t>(gamma.size()));
  std::iota(entries.begin(), entries.end(), Index{0});
  const auto seeds = std::min<std::size_t>(static_cast<std::size_t>(restarts), entries.size());
  std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(seeds),
                    entries.end(), [&](Index a, Index b) {
                      const double va = std::abs(gamma.data()[a]);
                      const double vb = std::abs(gamma.data()[b]);
                      return va > vb || (va == vb && a < b);
                    });
  std::vector<SupportPair> found(static_cast<std::size_t>(restarts));
  std::vector<double> value(static_cast<std::size_t>(restarts), -1.0);
  parallel_for(found.size(), opts.workers, [&](std::size_t r) {
    SupportPair s;
    if (r == 0) {
      const auto top = top_singular(gamma);
      s.rows = top_indices(top.left, k);
      s.cols = top_indices(top.right, m);
      truncated_power(gamma, k, m, s);
    } else {
      const Index e = entries[(r - 1) % seeds];
      const int row = static_cast<int>(e % gamma.rows());
      const int col = static_cast<int>(e / gamma.rows());
      s = greedy_growth(gamma, k, m, row, col);
    }
    value[r] = swap_search(gamma, s);
    found[r] = std::move(s);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < found.size(); ++r) {
    if (value[r] > value[best]) best = r;
  }
  return found[best];
}

void check_gamma_km_args(const Matrix& gamma, int k, int m) {
  if (gamma.size() == 0) throw std::invalid_argument("gamma_km: empty matrix");
  if (k < 1 || k > gamma.rows() || m < 1 || m > gamma.cols()) {
    throw std::invalid_argument("gamma_km: need 1 <= k <= n and 1 <= m <= N");
  }
}

}  // namespace

bool gamma_km_exact_feasible(int n, int N, int k, int m) {
  if (k == 1 || m == 1) return true;
  return saturating_product_within(binomial(n, k), binomial(N, m), kEnumerationBudget);
}

GammaKmResult gamma_km(const Matrix& gamma, int k, int m, SearchMode mode,
                       const SearchOptions& opts) {
  check_gamma_km_args(gamma, k, m);
  const int n = static_cast<int>(gamma.rows());
  const int N = static_cast<int>(gamma.cols());
  if (mode == SearchMode::Heuristic) {
    return finish(gamma, heuristic_search(gamma, k, m, opts), Exactness::LowerBound);
  }
  if (k == 1) return finish(gamma, single_row_support(gamma, m), Exactness::Exact);
  if (m == 1) {
    SupportPair t = single_row_support(gamma.transpose(), k);
    return finish(gamma, {t.cols, t.rows}, Exactness::Exact);
  }
  if (!gamma_km_exact_feasible(n, N, k, m)) {
    throw BudgetExceeded("gamma_km: C(" + std::to_string(n) + "," + std::to_string(k) + ")*C(" +
                         std::to_string(N) + "," + std::to_string(m) +
                         ") support pairs exceed the enumeration budget");
  }
  return finish(gamma, exact_enumeration(gamma, k, m, opts.workers), Exactness::Exact);
}

namespace {

struct RicValue {
  double delta = -1.0;
  Vector eigvec;
};

RicValue ric_of(const Matrix& gram, const std::vector<int>& support) {
  const Index m = static_cast<Index>(support.size());
  Matrix block(m, m);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) block(a, b) = gram(support[a], support[b]);
  }
  block.diagonal().array() -= 1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(block);
  const auto& ev = eig.eigenvalues();
  const bool top = std::abs(ev(m - 1)) >= std::abs(ev(0));
  return {std::abs(top ? ev(m - 1) : ev(0)), eig.eigenvectors().col(top ? m - 1 : 0)};
}

double ric_value(const Matrix& gram, const std::vector<int>& support) {
  const Index m = static_cast<Index>(support.size());
  Matrix block(m, m);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) block(a, b) = gram(support[a], support[b]);
  }
  block.diagonal().array() -= 1.0;
  if (m == 1) return std::abs(block(0, 0));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(block, Eigen::EigenvaluesOnly);
  return std::max(std::abs(eig.eigenvalues()(0)), std::abs(eig.eigenvalues()(m - 1)));
}

double ric_swaps(const Matrix& gram, std::vector<int>& support) {
  const int N = static_cast<int>(gram.cols());
  double current = ric_value(gram, support);
  for (;;) {
    std::vector<char> inside(static_cast<std::size_t>(N), 0);
    for (int v : support) inside[static_cast<std::size_t>(v)] = 1;
    double best = current;
    std::vector<int> best_support;
    for (std::size_t pos = 0; pos < support.size(); ++pos) {
      for (int cand = 0; cand < N; ++cand) {
        if (inside[static_cast<std::size_t>(cand)]) continue;
        std::vector<int> trial = support;
        trial[pos] = cand;
        std::sort(trial.begin(), trial.end());
        const double v = ric_value(gram, trial);
        if (v > best * (1.0 + 1e-12) + 1e-300) {
          best = v;
          best_support = std::move(trial);
        }
      }
    }
    if (best_support.empty()) return current;
    support = std::move(best_support);
    current = best;
  }
}

std::vector<int> ric_greedy(const Matrix& gram, int m) {
  const int N = static_cast<int>(gram.cols());
  std::vector<int> support;
  std::vector<char> inside(static_cast<std::size_t>(N), 0);
  while (static_cast<int>(support.size()) < m) {
    double best = -1.0;
    int best_j = -1;
    for (int j = 0; j < N; ++j) {
      if (inside[static_cast<std::size_t>(j)]) continue;
      std::vector<int> trial = support;
      trial.push_back(j);
      std::sort(trial.begin(), trial.end());
      const double v = ric_value(gram, trial);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    inside[static_cast<std::size_t>(best_j)] = 1;
    support.push_back(best_j);
    std::sort(support.begin(), support.end());
  }
  return support;
}

}  // namespace

RicResult ric(const Matrix& gamma, int m, SearchMode mode, const SearchOptions& opts) {
  if (gamma.size() == 0) throw std::invalid_argument("ric: empty matrix");
  const int N = static_cast<int>(gamma.cols());
  if (m < 1 || m > N) throw std::invalid_argument("ric: need 1 <= m <= N");
  const Matrix gram = gamma.transpose() * gamma / static_cast<double>(gamma.rows());

  std::vector<int> support;
  Exactness exactness = Exactness::Exact;
  if (mode == SearchMode::Exact) {
    const std::uint64_t count = binomial(N, m);
    if (count > kEnumerationBudget) {
      throw BudgetExceeded("ric: C(" + std::to_string(N) + "," + std::to_string(m) +
                           ") supports exceed the enumeration budget");
    }
    // Split the lexicographic enumeration by first element for parallelism.
    std::vector<double> best_value(static_cast<std::size_t>(N), -1.0);
    std::vector<std::vector<int>> best_support(static_cast<std::size_t>(N));
    parallel_for(static_cast<std::size_t>(N - m + 1), opts.workers, [&](std::size_t first) {
      std::vector<int> rest = first_combination(m - 1);
      const int tail = N - static_cast<int>(first) - 1;
      for (;;) {
        std::vector<int> s(static_cast<std::size_t>(m));
        s[0] = static_cast<int>(first);
        for (int j = 1; j < m; ++j) s[static_cast<std::size_t>(j)] = static_cast<int>(first) + 1 + rest[static_cast<std::size_t>(j - 1)];
        const double v = ric_value(gram, s);
        if (v > best_value[first]) {
          best_value[first] = v;
          best_support[first] = std::move(s);
        }
        if (!next_combination(rest, tail)) break;
      }
    });
    std::size_t best = 0;
    for (std::size_t f = 1; f < static_cast<std::size_t>(N - m + 1); ++f) {
      if (best_value[f] > best_value[best]) best = f;
    }
    support = best_support[best];
  } else {
    exactness = Exactness::LowerBound;
    const int restarts = std::max(1, opts.restarts);
    std::vector<std::vector<int>> found(static_cast<std::size_t>(restarts));
    std::vector<double> value(static_cast<std::size_t>(restarts), -1.0);
    parallel_for(found.size(), opts.workers, [&](std::size_t r) {
      std::vector<int> s;
      if (r == 0) {
        s = ric_greedy(gram, m);
      } else {
        Rng rng = substream(opts.seed, r);
        s = random_subset(N, m, rng);
      }
      value[r] = ric_swaps(gram, s);
      found[r] = std::move(s);
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < found.size(); ++r) {
      if (value[r] > value[best]) best = r;
    }
    support = found[best];
  }

  const auto v = ric_of(gram, support);
  RicResult res;
  res.delta = v.delta;
  res.support = support;
  res.exactness = exactness;
  res.x = Vector::Zero(N);
  Index imax = 0;
  v.eigvec.cwiseAbs().maxCoeff(&imax);
  const double sign = v.eigvec(imax) < 0 ? -1.0 : 1.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    res.x(support[i]) = sign * v.eigvec(static_cast<Index>(i));
  }
  return res;
}

}  // namespace chevetlab
