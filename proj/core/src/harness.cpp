#include "chevetlab/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "chevetlab/chaining.hpp"
#include "chevetlab/nets.hpp"
#include "chevetlab/version.hpp"
#include "experiments.hpp"

namespace chevetlab {

namespace {

constexpr std::array<std::pair<Experiment, std::string_view>, 10> kNames{{
    {Experiment::ChevetRatio, "chevet-ratio"},
    {Experiment::LoneScaling, "lone-scaling"},
    {Experiment::GammaKmScaling, "gamma-km-scaling"},
    {Experiment::Tails, "tails"},
    {Experiment::L1Sharpness, "l1-sharpness"},
    {Experiment::RotationGap, "rotation-gap"},
    {Experiment::RipGrid, "rip-grid"},
    {Experiment::LatalaComparison, "latala-comparison"},
    {Experiment::GammaSandwich, "gamma-sandwich"},
    {Experiment::NetAudit, "net-audit"},
}};

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_list(const std::vector<int>& v, const char* flag, int lo, int hi) {
  require(!v.empty(), std::string("empty grid: ") + flag + " needs at least one value");
  for (int x : v) {
    require(x >= lo && x <= hi, std::string(flag) + " values must lie in [" + std::to_string(lo) +
                                    ", " + std::to_string(hi) + "], got " + std::to_string(x));
  }
}

constexpr int kMaxDim = 1 << 16;

}  // namespace

std::string_view to_string(Experiment e) {
  for (const auto& [value, name] : kNames) {
    if (value == e) return name;
  }
  return "unknown";
}

Experiment experiment_from_string(std::string_view name) {
  for (const auto& [value, text] : kNames) {
    if (text == name) return value;
  }
  throw std::invalid_argument("unknown experiment: " + std::string(name));
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& entry : kNames) v.push_back(entry.first);
    return v;
  }();
  return all;
}

OutputFormat format_from_string(std::string_view name) {
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  throw std::invalid_argument("unknown format: " + std::string(name));
}

double ExperimentSpec::c_or_default() const {
  if (c) return *c;
  switch (name) {
    case Experiment::RotationGap: return 0.5;
    default: return 1.0;
  }
}

void ExperimentSpec::validate() const {
  require(trials >= 100, "trials must be >= 100");
  require(!c || *c > 0.0, "c must be positive");
  require(!c_probability || *c_probability > 0.0, "c-prob must be positive");
  switch (name) {
    case Experiment::ChevetRatio:
    case Experiment::LoneScaling:
    case Experiment::Tails:
    case Experiment::LatalaComparison:
      require_list(n, "--n", 1, kMaxDim);
      require_list(N, "--N", 1, kMaxDim);
      if (!k.empty()) require_list(k, "--k", 1, kMaxDim);
      if (!m.empty()) require_list(m, "--m", 1, kMaxDim);
      break;
    case Experiment::GammaKmScaling:
      require_list(n, "--n", 1, kMaxDim);
      require_list(N, "--N", 1, kMaxDim);
      require_list(k, "--k", 1, kMaxDim);
      require_list(m, "--m", 1, kMaxDim);
      break;
    case Experiment::RipGrid:
      require_list(n, "--n", 1, kMaxDim);
      require_list(N, "--N", 1, kMaxDim);
      require(theta > 0.0 && theta < 1.0, "theta must lie in (0, 1)");
      break;
    case Experiment::L1Sharpness:
    case Experiment::RotationGap: {
      require_list(n, "--n", 1, kMaxDim);
      const int widest = detail::exponential_width(*std::max_element(n.begin(), n.end()),
                                                   c_or_default());
      require(widest <= detail::kMaxExponentialWidth,
              "ceil(e^(c n)) exceeds " + std::to_string(detail::kMaxExponentialWidth));
      require(rotations >= 1, "rotations must be >= 1");
      break;
    }
    case Experiment::GammaSandwich:
      require_list(n, "--n", 1, kMaxChainingDim);
      break;
    case Experiment::NetAudit:
      require_list(n, "--n", 1, kMaxNetDim);
      require_list(k, "--k", 1, kMaxNetDim);
      for (int x : k) require(((x + 1) & x) == 0, "--k values must have the form 2^r - 1");
      break;
  }
}

void to_json(nlohmann::json& j, const ExperimentSpec& s) {
  j = nlohmann::json{{"name", to_string(s.name)},
                     {"n", s.n},
                     {"N", s.N},
                     {"k", s.k},
                     {"m", s.m},
                     {"trials", s.trials},
                     {"seed", s.seed},
                     {"c", s.c_or_default()},
                     {"rotations", s.rotations},
                     {"theta", s.theta},
                     {"format", s.format == OutputFormat::Json ? "json" : "csv"}};
  if (s.c_probability) j["cProbability"] = *s.c_probability;
}

void from_json(const nlohmann::json& j, ExperimentSpec& s) {
  s = ExperimentSpec{};
  s.name = experiment_from_string(j.at("name").get<std::string>());
  s.n = j.value("n", std::vector<int>{});
  s.N = j.value("N", std::vector<int>{});
  s.k = j.value("k", std::vector<int>{});
  s.m = j.value("m", std::vector<int>{});
  s.trials = j.at("trials").get<std::int64_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("c")) s.c = j.at("c").get<double>();
  if (j.contains("cProbability")) s.c_probability = j.at("cProbability").get<double>();
  s.rotations = j.value("rotations", 64);
  s.theta = j.value("theta", 0.5);
  s.format = format_from_string(j.value("format", std::string("json")));
}

bool ExperimentReport::passed() const {
  const bool cells_ok = std::none_of(cells.begin(), cells.end(),
                                     [](const Cell& c) { return c.verdict == kFail || c.verdict == kError; });
  const bool checks_ok =
      std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  return cells_ok && checks_ok;
}

ExperimentReport run(const ExperimentSpec& spec, unsigned workers) {
  spec.validate();
  ExperimentReport report;
  report.spec = spec;
  report.version = CHEVETLAB_VERSION;
  report.toolchain = CHEVETLAB_COMPILER;
  switch (spec.name) {
    case Experiment::ChevetRatio: detail::run_chevet_ratio(spec, workers, report); break;
    case Experiment::LoneScaling: detail::run_lone_scaling(spec, workers, report); break;
    case Experiment::GammaKmScaling: detail::run_gamma_km_scaling(spec, workers, report); break;
    case Experiment::Tails: detail::run_tails(spec, workers, report); break;
    case Experiment::L1Sharpness: detail::run_l1_sharpness(spec, workers, report); break;
    case Experiment::RotationGap: detail::run_rotation_gap(spec, workers, report); break;
    case Experiment::RipGrid: detail::run_rip_grid(spec, workers, report); break;
    case Experiment::LatalaComparison: detail::run_latala_comparison(spec, workers, report); break;
    case Experiment::GammaSandwich: detail::run_gamma_sandwich(spec, workers, report); break;
    case Experiment::NetAudit: detail::run_net_audit(spec, workers, report); break;
  }
  return report;
}

}  // namespace chevetlab
