#pragma once

#include "lipc/state.hpp"

#include <string>
#include <vector>

namespace lipc {

struct StepRule {
  double sufficient_decrease = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;
  bool barzilai_borwein = true;  // BB trial step after the first iteration
  int max_backtracks = 60;
};

struct RegularizedOptions {
  StepRule step;
  double stop_tol = 1e-9;
  int max_iter = 5000;
};

// J(u) = 1/2 ||S(u) - g||^2 + alpha/2 ||u||^2 with the nonsmooth state.
double reduced_objective(const ControlProblem& problem, const Vector& u);
double tracking_objective(const ControlProblem& problem, const Vector& y, const Vector& u);

struct SmoothedGradient {
  GridFunction grad;
  GridFunction y;  // smoothed state
  GridFunction p;  // smoothed adjoint
  GridFunction zeta;
  double objective = 0.0;  // J_eps(u)
};

// grad = p_eps + alpha u, p_eps from the adjoint with zeta = d/dy f_eps(., y_eps).
SmoothedGradient smoothed_gradient(const ControlProblem& problem, const Smoothing& smoothing, const Vector& u,
                                   const Vector* state_guess = nullptr);

GridFunction project_box(const Vector& u, const Bounds& bounds);
GridFunction project(const ControlProblem& problem, const Vector& u);

// ||u - P(u - grad)||_2 in the discrete L2 norm.
double natural_residual(const ControlProblem& problem, const Vector& u, const Vector& grad);

struct HistoryRow {
  double eps = 0.0;
  int iter = 0;
  double objective = 0.0;
  double natural_residual = 0.0;
};

struct RegularizedResult {
  GridFunction u;
  SmoothedGradient last;  // evaluated at u
  int iterations = 0;
  double natural_residual = 0.0;
  std::vector<HistoryRow> history;
};

// Projected gradient with Armijo backtracking on J_eps; stops at natural residual <= stop_tol.
RegularizedResult solve_regularized(const ControlProblem& problem, const Smoothing& smoothing, const Vector& u0,
                                    const RegularizedOptions& options);

struct Multipliers {
  GridFunction mu_a;
  GridFunction mu_b;
  double complementarity_a = 0.0;  // ||mu_a (u_a - u)||_inf
  double complementarity_b = 0.0;  // ||mu_b (u - u_b)||_inf
};

Multipliers extract_multipliers(const Vector& u, const Vector& p, double alpha, const Bounds& bounds);

struct PathLevel {
  double eps = 0.0;
  int iterations = 0;
  double natural_residual = 0.0;
  double objective = 0.0;
  double increment = 0.0;  // ||u_eps - u_prev||_2, zero on the first level
};

struct PathFollowResult {
  GridFunction u, y, zeta, p, mu_a, mu_b;
  GridFunction y_eps;  // smoothed state at the final eps
  std::vector<double> epsilons;
  std::vector<PathLevel> levels;
  std::vector<HistoryRow> history;
  double complementarity_a = 0.0;
  double complementarity_b = 0.0;
  bool non_cauchy = false;  // some increment grew along the path
  std::vector<std::string> warnings;
};

// Geometric schedule from eps_max down to eps_min with `levels` entries.
std::vector<double> geometric_schedule(double eps_max, double eps_min, int levels);

PathFollowResult path_follow(const ControlProblem& problem, const Smoothing& family,
                             const std::vector<double>& eps_schedule, const Vector& u0,
                             const RegularizedOptions& options);

}  // namespace lipc
