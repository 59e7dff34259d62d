#pragma once

#include "lipc/grid.hpp"
#include "lipc/network.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lipc {

struct SolverOptions {
  double newton_tol = 1e-10;
  int newton_max = 200;
  double cg_tol = 1e-12;
  int cg_max = 50000;
  std::optional<double> truncation_level;  // off unless set
  bool acknowledge_nonmonotone = false;
};

struct Bounds {
  GridFunction lower;
  GridFunction upper;
};

// Discrete optimal control problem: grid, nonlinearity, desired state g, cost weight alpha and
// optional box bounds. Validated on construction.
class ControlProblem {
 public:
  ControlProblem(Grid grid, Nonlinearity nl, GridFunction target, double alpha, std::optional<Bounds> bounds = {},
                 SolverOptions solver = {});

  const Grid& grid() const { return grid_; }
  const Nonlinearity& nonlinearity() const { return *nl_; }
  const GridFunction& target() const { return target_; }
  double alpha() const { return alpha_; }
  const std::optional<Bounds>& bounds() const { return bounds_; }
  const SolverOptions& solver() const { return solver_; }

  ControlProblem with_nonlinearity(Nonlinearity nl) const;
  ControlProblem with_solver(SolverOptions solver) const;
  ControlProblem with_bounds(std::optional<Bounds> bounds) const;
  ControlProblem with_target(GridFunction target) const;

 private:
  Grid grid_;
  std::shared_ptr<const Nonlinearity> nl_;
  GridFunction target_;
  double alpha_;
  std::optional<Bounds> bounds_;
  SolverOptions solver_;
};

// Smoothing of the nonlinearity in y: standard mollification or the canonical (activation-level)
// smoothing of a ReLU network.
struct Smoothing {
  enum class Kind { mollified, canonical };
  Kind kind = Kind::mollified;
  double epsilon = 1e-1;
  int panels = 64;
  int nodes_per_panel = 8;

  static Smoothing mollified(double eps, int panels = 64, int nodes = 8) {
    return {Kind::mollified, eps, panels, nodes};
  }
  static Smoothing canonical(double eps) { return {Kind::canonical, eps, 64, 8}; }
  Smoothing with_epsilon(double eps) const {
    Smoothing s = *this;
    s.epsilon = eps;
    return s;
  }
};

// y -> f(x_k, y) at every grid node, with optional truncation f_k(y) = f(clamp(y, -k, k)).
// Holds per-node Sections (scratch buffers): not for concurrent use.
class NodalNonlinearity {
 public:
  NodalNonlinearity(const Nonlinearity& nl, const Grid& grid, std::optional<double> truncation = {});

  const Section& section(Eigen::Index k) const { return sections_[shared_ ? 0 : k]; }
  Eigen::Index size() const { return size_; }

  GridFunction value(const Vector& y) const;
  void one_sided(const Vector& y, Vector& left, Vector& right) const;
  GridFunction weak_gradient(const Vector& y) const;

  GridFunction smoothed_value(const Smoothing& s, const Vector& y) const;
  GridFunction smoothed_deriv(const Smoothing& s, const Vector& y) const;

  // Upper bound on |d/dy f(x, y)| over all x, y.
  double slope_bound() const;

 private:
  const Nonlinearity* nl_;
  std::vector<Section> sections_;
  bool shared_;
  Eigen::Index size_;
  std::optional<double> truncation_;
  mutable std::optional<Mollifier> moll_cache_;
};

struct StateSolveResult {
  GridFunction y;
  int iterations = 0;
  double final_residual = 0.0;
  double linf_bound_used = 0.0;  // ||(-Delta_h)^{-1} |u - f(., 0)| ||_inf, a discrete L-inf bound on y
  bool truncation_active = false;
  bool picard_fallback = false;
  std::vector<double> residual_trace;
  std::vector<std::string> warnings;
  double min_smoothed_slope = 0.0;  // canonical smoothing: smallest sampled slope
};

// -Delta_h y + f(x, y) = u by semismooth Newton (slope f'_+), Armijo-damped on ||G||^2, with a
// Picard fallback. Requires a monotone-certified nonlinearity unless acknowledge_nonmonotone.
StateSolveResult solve_state(const ControlProblem& problem, const Vector& u, const Vector* initial_guess = nullptr);

// Same residual contract with the smoothed (C1) nonlinearity.
StateSolveResult solve_state_smoothed(const ControlProblem& problem, const Smoothing& smoothing, const Vector& u,
                                      const Vector* initial_guess = nullptr);

// -Delta_h z + f'(y; z) = h with the nodewise piecewise-linear map z -> f'(y; z).
GridFunction solve_sensitivity(const ControlProblem& problem, const Vector& y, const Vector& h);

// -Delta_h p + zeta p = rhs, zeta >= 0.
GridFunction solve_adjoint(const ControlProblem& problem, const Vector& zeta, const Vector& rhs);

// The discrete L-inf bound reported as linf_bound_used.
double state_linf_bound(const ControlProblem& problem, const Vector& u);

}  // namespace lipc
