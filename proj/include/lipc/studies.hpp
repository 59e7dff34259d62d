#pragma once

#include "lipc/config.hpp"
#include "lipc/io_util.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lipc {

// Scalar monotone function of y alone with its (weak) derivative.
struct ScalarLaw {
  std::function<double(double)> value;
  std::function<double(double)> slope;
};

ScalarLaw approx_target(const ApproxStudyConfig& cfg);

// -Delta_h y + phi(y) = u for a smooth monotone phi by damped Newton.
GridFunction solve_scalar_law_state(const Grid& grid, const ScalarLaw& law, const Vector& u,
                                    const SolverOptions& opts);

struct ApproxRow {
  double delta = 0.0;
  int knots = 0;
  double sup_error = 0.0;
  double slope_error = 0.0;
  double w1inf_error = 0.0;
  double state_h1 = 0.0;
  double state_Y = 0.0;
  double state_holder = 0.0;
  double control_l2 = 0.0;    // ||u_n - u_finest||_2, NaN when optimisation is off
  double opt_state_h1 = 0.0;  // ||S_n(u_n) - S_finest(u_finest)||_H1
};

struct ApproxStudyResult {
  std::vector<ApproxRow> rows;
  std::string csv(const CsvMetadata& meta) const;
};

ApproxStudyResult run_approx_study(const ControlProblem& problem, const ExperimentConfig& config);

struct MollifierRow {
  double kink = 0.0;
  int sequence = 0;
  std::string scheme;
  int n = 0;
  double y = 0.0;
  double eps = 0.0;
  double deriv = 0.0;
  double clarke_lo = 0.0;
  double clarke_hi = 0.0;
  double limsup = 0.0;  // max over the tail n/2..n
  double liminf = 0.0;
  bool in_interval = false;  // deriv within the Clarke interval widened by 1e-8
};

struct MollifierStudyResult {
  std::vector<MollifierRow> rows;
  bool all_in_interval = true;
  bool limsup_ok = true;
  bool liminf_ok = true;
  std::string csv(const CsvMetadata& meta) const;
};

// Seeded sequences y_n -> kink with eps_n -> 0 for every kink of a 1-D nonlinearity. Schemes
// cycle through right (k + c/n), left (k - c/n), oscillating (k + (-1)^n c/n) and on-kink (k).
MollifierStudyResult run_mollifier_study(const Nonlinearity& nl, const MollifierStudyConfig& config,
                                         std::uint64_t seed);

}  // namespace lipc
