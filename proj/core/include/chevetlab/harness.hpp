#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chevetlab/montecarlo.hpp"

namespace chevetlab {

enum class Experiment {
  ChevetRatio,
  LoneScaling,
  GammaKmScaling,
  Tails,
  L1Sharpness,
  RotationGap,
  RipGrid,
  LatalaComparison,
  GammaSandwich,
  NetAudit,
};

std::string_view to_string(Experiment e);
Experiment experiment_from_string(std::string_view name);
const std::vector<Experiment>& all_experiments();

enum class OutputFormat { Json, Csv };

OutputFormat format_from_string(std::string_view name);

struct ExperimentSpec {
  Experiment name = Experiment::ChevetRatio;
  std::vector<int> n;
  std::vector<int> N;
  std::vector<int> k;
  std::vector<int> m;
  std::int64_t trials = 1000;
  std::uint64_t seed = 1;
  std::optional<double> c;
  std::optional<double> c_probability;  // rip-grid success-probability constant
  int rotations = 64;
  double theta = 0.5;
  std::string out;
  OutputFormat format = OutputFormat::Json;

  /// Throws std::invalid_argument for an empty or out-of-range grid.
  void validate() const;
  /// c with the per-experiment default filled in.
  double c_or_default() const;
};

void to_json(nlohmann::json& j, const ExperimentSpec& s);
void from_json(const nlohmann::json& j, ExperimentSpec& s);

inline constexpr std::string_view kPass = "pass";
inline constexpr std::string_view kFail = "fail";
inline constexpr std::string_view kInfo = "info";
inline constexpr std::string_view kError = "error";

struct Cell {
  int n = 0;
  int N = 0;
  int k = 0;
  int m = 0;
  std::string label;
  EstimateWithCI estimate;
  double bound = 0.0;
  double ratio = 0.0;
  std::string verdict{kInfo};
  nlohmann::json extra = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const Cell& c);
void from_json(const nlohmann::json& j, Cell& c);

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

void to_json(nlohmann::json& j, const Check& c);
void from_json(const nlohmann::json& j, Check& c);

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<Cell> cells;
  std::vector<Check> checks;
  nlohmann::json fitted = nlohmann::json::object();
  std::string version;
  std::string toolchain;

  /// No failing cell and no failing check.
  bool passed() const;
};

void to_json(nlohmann::json& j, const ExperimentReport& r);
void from_json(const nlohmann::json& j, ExperimentReport& r);

/// Runs one experiment. The report depends only on the spec, never on the
/// worker count.
ExperimentReport run(const ExperimentSpec& spec, unsigned workers = default_workers());

/// Serialized report. CSV has one row per cell with columns
/// experiment,n,N,k,m,estimate,se,bound,ratio,verdict.
std::string emit(const ExperimentReport& report, OutputFormat format);

/// Writes emit(report, format) to `path`.
void write_report(const ExperimentReport& report, OutputFormat format, const std::string& path);

}  // namespace chevetlab
