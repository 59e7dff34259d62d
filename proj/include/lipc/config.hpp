#pragma once

#include "lipc/optimizer.hpp"
#include "lipc/stationarity.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lipc {

// A field on the grid: a named analytic preset or a CSV import.
//   zero | constant(value) | eigenmode(amplitude, mode) | bump(amplitude, center, width)
//   | tilted-plane(amplitude, offset, slope) | csv(file)
struct FieldSpec {
  std::string preset = "zero";
  double amplitude = 1.0;
  double value = 0.0;
  std::vector<int> mode{1, 1};
  std::vector<double> center;  // defaults to the domain midpoint
  double width = 0.2;
  double offset = 0.0;
  std::vector<double> slope;
  std::filesystem::path file;
};

GridFunction realize(const FieldSpec& spec, const Grid& grid);

struct SolveConfig {
  FieldSpec control;
};

struct OptimizeConfig {
  Smoothing smoothing;
  std::vector<double> eps_schedule;
  RegularizedOptions options;
  FieldSpec initial_control;
};

struct CheckConfig {
  std::vector<std::string> conditions{"B", "weak", "C", "strong"};
  StationarityTolerances tol;
  bool auto_kink_tol = true;  // kink_tol = final eps + ||y - y_eps||_inf
  std::optional<FieldSpec> control;  // check at this control instead of optimising
};

struct ApproxStudyConfig {
  std::string target = "cubic";  // cubic | relu | shifted_relu | double_kink
  double t0 = 0.0, t1 = 1.0, s0 = 0.5, s1 = 1.0, s2 = 2.0;
  std::vector<double> spacings{0.4, 0.2, 0.1, 0.05};
  double window = 3.0;
  int dense_points = 10000;
  double holder_exponent = 0.5;
  bool optimize = true;
  FieldSpec control = [] {
    FieldSpec f;
    f.preset = "bump";
    f.amplitude = 10.0;
    return f;
  }();
};

struct MollifierStudyConfig {
  int sequences = 20;
  int terms = 200;
  double eps_power = 1.0;  // eps_n = r / (2 n^power)
  std::optional<double> radius;  // defaults to min(1, 0.45 * smallest kink gap)
};

struct ExperimentConfig {
  std::string source;       // config path
  std::string config_hash;  // FNV-1a of the config bytes
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  SolveConfig solve;
  OptimizeConfig optimize;
  CheckConfig check;
  ApproxStudyConfig approx;
  MollifierStudyConfig mollifier;
};

struct ParsedConfig {
  ControlProblem problem;
  ExperimentConfig experiment;
};

// Unknown keys and invalid values raise ParseError naming the key path.
ParsedConfig parse_config(const std::filesystem::path& path);
ParsedConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir,
                               const std::string& source = "<string>");

// Nonlinearity by builtin name ("zero", "identity", "relu", ...) with default parameters.
Nonlinearity builtin_by_name(const std::string& name);

}  // namespace lipc
