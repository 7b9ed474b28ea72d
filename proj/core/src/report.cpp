#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "chevetlab/harness.hpp"

namespace chevetlab {

namespace {

nlohmann::json estimate_json(const EstimateWithCI& e) {
  return {{"mean", e.mean}, {"se", e.se}, {"trials", e.trials}, {"seed", e.seed}};
}

EstimateWithCI estimate_from(const nlohmann::json& j) {
  EstimateWithCI e;
  e.mean = j.at("mean").get<double>();
  e.se = j.at("se").get<double>();
  e.trials = j.at("trials").get<std::int64_t>();
  e.seed = j.at("seed").get<std::uint64_t>();
  return e;
}

std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void to_json(nlohmann::json& j, const Cell& c) {
  j = nlohmann::json{{"n", c.n},
                     {"N", c.N},
                     {"k", c.k},
                     {"m", c.m},
                     {"label", c.label},
                     {"estimate", estimate_json(c.estimate)},
                     {"bound", c.bound},
                     {"ratio", c.ratio},
                     {"verdict", c.verdict},
                     {"extra", c.extra}};
}

void from_json(const nlohmann::json& j, Cell& c) {
  c.n = j.at("n").get<int>();
  c.N = j.at("N").get<int>();
  c.k = j.at("k").get<int>();
  c.m = j.at("m").get<int>();
  c.label = j.at("label").get<std::string>();
  c.estimate = estimate_from(j.at("estimate"));
  c.bound = j.at("bound").get<double>();
  c.ratio = j.at("ratio").get<double>();
  c.verdict = j.at("verdict").get<std::string>();
  c.extra = j.at("extra");
}

void to_json(nlohmann::json& j, const Check& c) {
  j = nlohmann::json{{"name", c.name},
                     {"passed", c.passed},
                     {"value", c.value},
                     {"threshold", c.threshold},
                     {"detail", c.detail}};
}

void from_json(const nlohmann::json& j, Check& c) {
  c.name = j.at("name").get<std::string>();
  c.passed = j.at("passed").get<bool>();
  c.value = j.at("value").get<double>();
  c.threshold = j.at("threshold").get<double>();
  c.detail = j.at("detail").get<std::string>();
}

void to_json(nlohmann::json& j, const ExperimentReport& r) {
  j = nlohmann::json{{"experiment", to_string(r.spec.name)},
                     {"spec", r.spec},
                     {"seed", r.spec.seed},
                     {"version", r.version},
                     {"toolchain", r.toolchain},
                     {"cells", r.cells},
                     {"checks", r.checks},
                     {"fitted", r.fitted},
                     {"passed", r.passed()}};
}

void from_json(const nlohmann::json& j, ExperimentReport& r) {
  r = ExperimentReport{};
  r.spec = j.at("spec").get<ExperimentSpec>();
  r.version = j.at("version").get<std::string>();
  r.toolchain = j.at("toolchain").get<std::string>();
  r.cells = j.at("cells").get<std::vector<Cell>>();
  r.checks = j.at("checks").get<std::vector<Check>>();
  r.fitted = j.at("fitted");
}

std::string emit(const ExperimentReport& report, OutputFormat format) {
  if (format == OutputFormat::Json) return nlohmann::json(report).dump(2) + "\n";
  std::ostringstream os;
  os << "experiment,n,N,k,m,estimate,se,bound,ratio,verdict\n";
  for (const auto& c : report.cells) {
    os << to_string(report.spec.name) << ',' << c.n << ',' << c.N << ',' << c.k << ',' << c.m
       << ',' << csv_number(c.estimate.mean) << ',' << csv_number(c.estimate.se) << ','
       << csv_number(c.bound) << ',' << csv_number(c.ratio) << ',' << c.verdict << '\n';
  }
  return os.str();
}

void write_report(const ExperimentReport& report, OutputFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << emit(report, format);
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace chevetlab
