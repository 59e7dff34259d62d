#pragma once

#include "lipc/io_util.hpp"
#include "lipc/state.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lipc {

enum class Verdict { pass, fail, not_applicable };
const char* to_string(Verdict v);

struct StationarityTolerances {
  double tol_B = 1e-6;
  double tol_weak = 1e-6;
  double tol_C = 1e-3;
  double tol_strong = 1e-3;
  double tol_act = 1e-8;
  double kink_tol = 1e-8;  // half-width of the window used for Clarke sets and Omega_f
  int directions = 50;
  std::uint64_t seed = 0;
};

struct Direction {
  std::string id;
  GridFunction h;
};

struct StationarityReport {
  StationarityTolerances tol;

  // B
  bool b_run = false;
  double b_min_directional = 0.0;
  std::string b_witness;
  int b_directions = 0;

  // weak
  bool weak_run = false;
  double adjoint_eq = 0.0;
  double vi_or_mu = 0.0;
  double zeta_negativity = 0.0;
  bool mu_system = false;  // vi_or_mu is the multiplier-system residual (box bounds present)
  double mu_stationarity = 0.0;
  double mu_feasibility = 0.0;
  double mu_complementarity = 0.0;
  double mu_sign = 0.0;

  // C
  bool c_run = false;
  double c_inclusion_max = 0.0;
  long c_witness_node = -1;

  // strong
  bool strong_run = false;
  double strong_sign_max = 0.0;
  long strong_witness_node = -1;

  // constraint qualifications (node-fraction surrogates)
  bool cq_run = false;
  double active_set_fraction = 0.0;
  double omega_f_fraction = 0.0;
  double intersection_fraction = 0.0;  // Omega_f against the one-node dilation of the active set
  bool cq_holds = true;
  bool cqf_holds = true;

  // verdicts, fixed order
  Verdict b = Verdict::not_applicable;
  Verdict weak = Verdict::not_applicable;
  Verdict mu = Verdict::not_applicable;
  Verdict c = Verdict::not_applicable;
  Verdict strong = Verdict::not_applicable;

  // implication cross-checks: "consistent", "inconsistent" or "not_applicable"
  struct Implication {
    std::string name;
    std::string status = "not_applicable";
    std::string detail;
  };
  std::vector<Implication> implications;
  std::vector<std::string> notes;

  // inputs to the quantitative implication checks
  double b_slack = 0.0;             // largest a-priori lower-bound deficit over the B directions
  double witness_prediction = 0.0;  // most negative predicted derivative over strong-witness directions
  std::string witness_prediction_id;

  bool inconsistent() const;
  bool all_pass(const std::vector<std::string>& requested) const;
  int exit_code(const std::vector<std::string>& requested) const;  // 0, 2 or 3
  // Stable field order; `meta` entries come first when given.
  std::string to_json(const CsvMetadata* meta = nullptr) const;
};

// Seeded Gaussian fields, sign-corrected on the (nearly) active sets and L2-normalised; if p is
// given the steepest feasible descent -(p + alpha u) is appended.
std::vector<Direction> sample_contingent_directions(const ControlProblem& problem, const Vector& u, int count,
                                                    std::uint64_t seed, double tol_act,
                                                    const Vector* p = nullptr);

// <y - g, S'(u; h)> + alpha <u, h>.
double directional_objective_derivative(const ControlProblem& problem, const Vector& u, const Vector& y,
                                        const Vector& h);

// Windowed strong-sign residual and Clarke distance at one node.
double clarke_distance(const Section& section, double y, double zeta, double radius);
double strong_sign_residual(const Section& section, double y, double zeta, double p, double radius);

void check_B(const ControlProblem& problem, const Vector& u, const Vector& y, const Vector* zeta, const Vector* p,
             StationarityReport& report);
void check_weak(const ControlProblem& problem, const Vector& u, const Vector& y, const Vector& zeta, const Vector& p,
                StationarityReport& report);
void check_C(const ControlProblem& problem, const Vector& u, const Vector& y, const Vector& zeta,
             StationarityReport& report);
void check_strong(const ControlProblem& problem, const Vector& u, const Vector& y, const Vector& zeta,
                  const Vector& p, StationarityReport& report);
void check_cq(const ControlProblem& problem, const Vector& u, const Vector& y, StationarityReport& report);

// Cross-validates the implications between the conditions.
void assemble_verdicts(StationarityReport& report);

// Runs every check in order and assembles the verdicts.
StationarityReport check_all(const ControlProblem& problem, const Vector& u, const Vector& y, const Vector& zeta,
                             const Vector& p, const StationarityTolerances& tol);

}  // namespace lipc
