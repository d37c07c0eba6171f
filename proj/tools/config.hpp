#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlds/analysis.hpp"
#include "nlds/epidemic.hpp"
#include "nlds/model.hpp"

namespace nlds::cli {

/// Malformed, incomplete or schema-violating configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct SystemConfig {
  std::size_t l = 0;
  std::size_t l1 = 0;
  std::vector<double> d;
  std::vector<std::string> kernels;
  /// Row-major l x l expression strings.
  std::vector<std::vector<std::string>> coefficients;
};

struct SolverConfig {
  double tol = 1e-12;
  std::size_t max_iter = 100000;
  std::optional<double> gap_tol;
  double r0_tol = 1e-10;
  double bisection_tol = 1e-10;
};

struct SweepConfig {
  std::string mode = "small-d";
  std::vector<double> t_schedule;
};

struct DiagnoseConfig {
  std::optional<Interval> region;
  std::size_t window = 10;
  std::optional<double> lambda;
};

struct ProbeConfig {
  std::vector<double> deltas{1e-2, 1e-3, 1e-4, 1e-5};
  std::size_t draws = 5;
  double shift = 0.5;
};

struct EpidemicConfig {
  std::string kernel;
  double d = 0.0;
  std::string r, m, b, beta_d, beta_i;
  std::vector<double> d_schedule;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"json", "csv"};
};

struct RunConfig {
  Interval domain;
  std::size_t n = 0;
  std::vector<std::size_t> refinement;
  std::optional<SystemConfig> system;
  SolverConfig solver;
  std::optional<SweepConfig> sweep;
  std::optional<DiagnoseConfig> diagnose;
  std::optional<ProbeConfig> probe;
  std::optional<EpidemicConfig> epidemic;
  OutputConfig output;
  std::uint64_t seed = 0;

  bool wants(const std::string& format) const;
};

/// Schema-checked parse; unknown keys and wrong types throw ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Canonical echo; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& c);

bool operator==(const RunConfig& a, const RunConfig& b);

/// Expression strings parsed into the library's types. Throw ConfigError on parse errors.
DispersalSystem build_system(const RunConfig& c);
VSIParams build_epidemic(const RunConfig& c);

}  // namespace nlds::cli
