#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/SVD>

#include "chevetlab/bounds.hpp"
#include "chevetlab/ensembles.hpp"
#include "chevetlab/harness.hpp"
#include "chevetlab/submatrix.hpp"

namespace {

using namespace chevetlab;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string summarize_checks(const ExperimentReport& r) {
  int failing = 0;
  for (const auto& c : r.cells) failing += c.verdict == kFail || c.verdict == kError;
  std::string out = std::to_string(r.cells.size()) + " cells, " + std::to_string(failing) + " failing";
  for (const auto& c : r.checks) {
    out += "; " + c.name + " " + fmt(c.value) + (c.passed ? " ok" : " FAILED") + " (threshold " +
           fmt(c.threshold) + ")";
  }
  return out;
}

Outcome run_experiment(ExperimentSpec spec) {
  const auto r = run(spec);
  return {r.passed(), summarize_checks(r)};
}

ExperimentSpec make_spec(Experiment e, std::vector<int> n, std::vector<int> N, std::int64_t trials,
                         std::uint64_t seed) {
  ExperimentSpec s;
  s.name = e;
  s.n = std::move(n);
  s.N = std::move(N);
  s.trials = trials;
  s.seed = seed;
  return s;
}

Matrix exponential_matrix(int n, int N, std::uint64_t seed) {
  Rng rng = substream(seed, 0);
  return sample(EnsembleSpec::of(EnsembleKind::Exponential, n, N), rng);
}

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
    for (int j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

double svd_gamma_km(const Matrix& a, int k, int m) {
  double best = 0.0;
  for_each_subset(static_cast<int>(a.rows()), k, [&](const std::vector<int>& r) {
    for_each_subset(static_cast<int>(a.cols()), m, [&](const std::vector<int>& c) {
      Matrix b(k, m);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j) b(i, j) = a(r[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(j)]);
      best = std::max(best, Eigen::JacobiSVD<Matrix>(b).singularValues()(0));
    });
  });
  return best;
}

Outcome isotropy() {
  constexpr EnsembleKind kinds[] = {
      EnsembleKind::Gaussian,      EnsembleKind::Exponential,        EnsembleKind::UniformCube,
      EnsembleKind::UniformBpBall, EnsembleKind::RotatedExponential, EnsembleKind::IndependentLcRows};
  bool ok = true;
  double worst = 0.0;
  std::uint64_t seed = 101;
  for (auto kind : kinds) {
    for (auto [n, N] : {std::pair{6, 6}, std::pair{1, 36}}) {
      auto spec = EnsembleSpec::of(kind, n, N);
      spec.p = 1.5;
      spec.rotation_seed = 7;
      spec.row_kind = EnsembleKind::UniformBpBall;
      const auto r = check_isotropy(spec, 100000, seed++);
      ok = ok && r.passed;
      worst = std::max(worst, r.max_abs_cov_deviation / r.threshold);
    }
  }
  return {ok, "12 ensembles at d = 36, worst deviation / threshold " + fmt(worst) + " (<= 1)"};
}

Outcome gamma_km_oracle() {
  bool ordered = true;
  double worst_rel = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Matrix a = exponential_matrix(6, 8, 1000 + s);
    for (int k : {1, 2}) {
      for (int m : {1, 2}) {
        const double exact = gamma_km(a, k, m, SearchMode::Exact).norm.value;
        const double heuristic = gamma_km(a, k, m, SearchMode::Heuristic).norm.value;
        ordered = ordered && heuristic <= exact * (1.0 + 1e-12);
        worst_rel = std::max(worst_rel, std::abs(exact - svd_gamma_km(a, k, m)) / exact);
      }
    }
  }
  return {ordered && worst_rel <= 1e-9, std::string("heuristic <= exact: ") + (ordered ? "yes" : "no") +
                                            ", max relative gap to SVD oracle " + fmt(worst_rel) +
                                            " (<= 1e-9)"};
}

Outcome ric_checks() {
  const int n = 6;
  const Matrix identity = std::sqrt(static_cast<double>(n)) * Matrix::Identity(n, n);
  double identity_delta = 0.0;
  for (int m = 1; m <= n; ++m) identity_delta = std::max(identity_delta, ric(identity, m, SearchMode::Exact).delta);

  Matrix dup = exponential_matrix(6, 8, 77);
  for (Index j = 0; j < dup.cols(); ++j) dup.col(j) *= std::sqrt(6.0) / dup.col(j).norm();
  dup.col(6) = dup.col(1);
  const double dup_delta = ric(dup, 2, SearchMode::Exact).delta;

  bool ordered = true;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Matrix a = exponential_matrix(6, 8, 2000 + s);
    for (int m : {1, 2, 3}) {
      ordered = ordered &&
                ric(a, m, SearchMode::Heuristic).delta <= ric(a, m, SearchMode::Exact).delta + 1e-12;
    }
  }
  const bool ok = identity_delta <= 1e-12 && std::abs(dup_delta - 1.0) <= 1e-9 && ordered;
  return {ok, "identity delta " + fmt(identity_delta) + " (<= 1e-12), duplicated-column delta " +
                  fmt(dup_delta) + " (1 +- 1e-9), heuristic <= exact: " + (ordered ? "yes" : "no")};
}

Outcome lone_scaling() {
  return run_experiment(make_spec(Experiment::LoneScaling, {1, 2, 4, 8, 16, 32, 64},
                                  {1, 4, 16, 64, 256, 1024, 4096}, 2000, 12));
}

Outcome estum_band() {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  std::uint64_t seed = 500;
  for (int n : {16, 64, 256}) {
    for (int l : {1, 2, 4, 8}) {
      const double ratio = estUm_exact(l, n, 5000, seed++).mean / estUm_closed(l, n);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  return {hi / lo <= 3.0, "ratio range [" + fmt(lo) + ", " + fmt(hi) + "], width " + fmt(hi / lo) +
                              " (<= 3)"};
}

Outcome chevet_sandwich() {
  return run_experiment(make_spec(Experiment::ChevetRatio, {2, 8, 32}, {2, 8, 32}, 1000, 11));
}

Outcome sharpness() {
  return run_experiment(make_spec(Experiment::L1Sharpness, {2, 3, 4, 5, 6, 7, 8}, {}, 2000, 13));
}

Outcome submatrix_scaling() {
  auto spec = make_spec(Experiment::GammaKmScaling, {32}, {32}, 100, 15);
  spec.k = {1, 2, 4, 8};
  spec.m = {1, 2, 4, 8};
  const auto r = run(spec);
  std::string detail = summarize_checks(r) + "; C_hat " + fmt(r.fitted["C_hat"].get<double>());
  for (const auto& [name, spread] : r.fitted["twoSidedSpread"].items()) {
    detail += "; " + name + " max/min " + fmt(spread.get<double>());
  }
  return {r.passed(), detail};
}

Outcome tail_shape_fit() {
  return run_experiment(make_spec(Experiment::Tails, {16}, {16}, 100000, 16));
}

Outcome chaining_sandwich() {
  return run_experiment(make_spec(Experiment::GammaSandwich, {8, 12, 16}, {}, 20000, 17));
}

Outcome net_audit() {
  std::vector<int> n(16);
  for (int i = 0; i < 16; ++i) n[static_cast<std::size_t>(i)] = i + 1;
  auto spec = make_spec(Experiment::NetAudit, n, {}, 10000, 18);
  spec.k = {1, 3, 7};
  return run_experiment(spec);
}

Outcome rotation_gap() {
  auto spec = make_spec(Experiment::RotationGap, {2, 3, 4}, {}, 2000, 14);
  spec.rotations = 64;
  spec.c = 0.5;
  return run_experiment(spec);
}

Outcome comparison() {
  return run_experiment(make_spec(Experiment::LatalaComparison, {2, 4}, {4, 8}, 2000, 19));
}

ExperimentSpec reduced_spec(Experiment e) {
  auto s = make_spec(e, {2, 3}, {2, 4}, 300, 21);
  switch (e) {
    case Experiment::GammaKmScaling:
      s.n = s.N = {8};
      s.k = s.m = {1, 2, 4};
      break;
    case Experiment::L1Sharpness:
    case Experiment::RotationGap:
      s.N.clear();
      s.rotations = 4;
      break;
    case Experiment::RipGrid:
      s.n = {64, 128};
      s.N = {16};
      s.c = 2.0;
      break;
    case Experiment::GammaSandwich:
      s.n = {8, 16};
      s.N.clear();
      break;
    case Experiment::NetAudit:
      s.n = {8, 16};
      s.N.clear();
      s.k = {1, 3, 7};
      break;
    default: break;
  }
  return s;
}

Outcome reproducibility() {
  int identical = 0;
  std::string differing;
  for (auto e : all_experiments()) {
    const auto spec = reduced_spec(e);
    const auto a = run(spec, 1);
    const auto b = run(spec, 8);
    const bool same = emit(a, OutputFormat::Json) == emit(b, OutputFormat::Json) &&
                      emit(a, OutputFormat::Csv) == emit(b, OutputFormat::Csv) &&
                      emit(run(spec, 8), OutputFormat::Json) == emit(b, OutputFormat::Json);
    if (same) {
      ++identical;
    } else {
      differing += " " + std::string(to_string(e));
    }
  }
  return {identical == static_cast<int>(all_experiments().size()),
          std::to_string(identical) + "/10 experiments byte-identical for 1 vs 8 workers" +
              (differing.empty() ? "" : "; differ:" + differing)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> check;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"isotropy audit", isotropy},
      {"submatrix norm oracle equivalence", gamma_km_oracle},
      {"restricted isometry constant", ric_checks},
      {"l1 -> l1 scaling", lone_scaling},
      {"sparse top-l norm scaling", estum_band},
      {"Chevet-type sandwich", chevet_sandwich},
      {"l1 sharpness growth", sharpness},
      {"submatrix norm bound", submatrix_scaling},
      {"tail shape", tail_shape_fit},
      {"chaining sandwich", chaining_sandwich},
      {"sparse net audit", net_audit},
      {"rotation gap", rotation_gap},
      {"comparison with exponential matrices", comparison},
      {"reproducibility", reproducibility},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chevetlab acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-14); default runs all")
      ->check(CLI::Range(1, 14));
  CLI11_PARSE(app, argc, argv);

  bool all_passed = true;
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    const auto& c = criteria()[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%02zu] %s: %s [%.1fs]\n", o.passed ? "PASS" : "FAIL", i + 1, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all_passed = all_passed && o.passed;
  }
  return all_passed ? 0 : 1;
}
