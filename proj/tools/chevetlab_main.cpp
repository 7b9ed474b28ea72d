#include <cstdio>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chevetlab/harness.hpp"
#include "chevetlab/version.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (auto e : chevetlab::all_experiments()) names.emplace_back(chevetlab::to_string(e));
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo experiments for Chevet-type inequalities of log-concave matrices"};
  app.set_version_flag("--version", std::string("chevetlab ") + CHEVETLAB_VERSION);

  std::string experiment;
  std::vector<int> n;
  std::vector<int> N;
  std::vector<int> k;
  std::vector<int> m;
  std::int64_t trials = 1000;
  std::uint64_t seed = 1;
  double c = 0.0;
  double c_prob = 0.0;
  int rotations = 64;
  double theta = 0.5;
  std::string out;
  std::string format = "json";

  app.add_option("experiment", experiment, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(experiment_names()));
  app.add_option("--n", n, "Row dimensions (comma separated)")->delimiter(',');
  app.add_option("--N", N, "Column dimensions (comma separated)")->delimiter(',');
  app.add_option("--k", k, "Row sparsities (comma separated)")->delimiter(',');
  app.add_option("--m", m, "Column sparsities (comma separated)")->delimiter(',');
  app.add_option("--trials", trials, "Monte Carlo trials per cell")->capture_default_str();
  app.add_option("--seed", seed, "Master seed")->capture_default_str();
  auto* c_opt = app.add_option("--c", c, "Experiment constant (N = ceil(e^(c n)), tail or RIP constant)");
  auto* c_prob_opt = app.add_option("--c-prob", c_prob, "rip-grid success-probability constant");
  app.add_option("--rotations", rotations, "rotation-gap: number of sampled rotations")
      ->capture_default_str();
  app.add_option("--theta", theta, "rip-grid: isometry level theta in (0, 1)")
      ->capture_default_str();
  app.add_option("--out", out, "Output path (stdout when omitted)");
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  chevetlab::ExperimentSpec spec;
  try {
    spec.name = chevetlab::experiment_from_string(experiment);
    spec.n = n;
    spec.N = N;
    spec.k = k;
    spec.m = m;
    spec.trials = trials;
    spec.seed = seed;
    if (*c_opt) spec.c = c;
    if (*c_prob_opt) spec.c_probability = c_prob;
    spec.rotations = rotations;
    spec.theta = theta;
    spec.out = out;
    spec.format = chevetlab::format_from_string(format);
    spec.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "chevetlab: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const auto report = chevetlab::run(spec);
    if (out.empty()) {
      std::cout << chevetlab::emit(report, spec.format);
    } else {
      chevetlab::write_report(report, spec.format, out);
    }
    std::cerr << experiment << ": " << report.cells.size() << " cells, "
              << (report.passed() ? "pass" : "fail") << "\n";
    return report.passed() ? kExitPass : kExitFail;
  } catch (const std::invalid_argument& e) {
    std::cerr << "chevetlab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "chevetlab: " << e.what() << "\n";
    return kExitFail;
  }
}
