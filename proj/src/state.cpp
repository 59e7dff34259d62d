#include "lipc/state.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <variant>

namespace lipc {

// ---------------------------------------------------------------------------------------------
// ControlProblem

ControlProblem::ControlProblem(Grid grid, Nonlinearity nl, GridFunction target, double alpha,
                               std::optional<Bounds> bounds, SolverOptions solver)
    : grid_(std::move(grid)),
      nl_(std::make_shared<const Nonlinearity>(std::move(nl))),
      target_(std::move(target)),
      alpha_(alpha),
      bounds_(std::move(bounds)),
      solver_(solver) {
  grid_.require(target_.size(), "target g");
  if (!(alpha_ > 0.0)) throw ParameterError("ControlProblem: alpha must be positive");
  if (auto d = nl_->spatial_dim(); d && *d != grid_.dim())
    throw DimensionError("ControlProblem: network input_dim - 1 vs grid dimension", grid_.dim(), *d);
  if (bounds_) {
    grid_.require(bounds_->lower.size(), "lower bound u_a");
    grid_.require(bounds_->upper.size(), "upper bound u_b");
    for (Eigen::Index k = 0; k < grid_.size(); ++k)
      if (!(bounds_->lower(k) < bounds_->upper(k)))
        throw ParameterError("ControlProblem: bounds need u_a < u_b, violated at node " + std::to_string(k));
  }
  if (!(solver_.newton_tol > 0.0) || !(solver_.cg_tol > 0.0) || solver_.newton_max < 1 || solver_.cg_max < 1)
    throw ParameterError("ControlProblem: solver tolerances and caps must be positive");
  if (solver_.truncation_level && !(*solver_.truncation_level > 0.0))
    throw ParameterError("ControlProblem: truncation level must be positive");
}

ControlProblem ControlProblem::with_nonlinearity(Nonlinearity nl) const {
  return ControlProblem(grid_, std::move(nl), target_, alpha_, bounds_, solver_);
}

ControlProblem ControlProblem::with_solver(SolverOptions solver) const {
  return ControlProblem(grid_, *nl_, target_, alpha_, bounds_, solver);
}

ControlProblem ControlProblem::with_bounds(std::optional<Bounds> bounds) const {
  return ControlProblem(grid_, *nl_, target_, alpha_, std::move(bounds), solver_);
}

ControlProblem ControlProblem::with_target(GridFunction target) const {
  return ControlProblem(grid_, *nl_, std::move(target), alpha_, bounds_, solver_);
}

// ---------------------------------------------------------------------------------------------
// NodalNonlinearity

NodalNonlinearity::NodalNonlinearity(const Nonlinearity& nl, const Grid& grid, std::optional<double> truncation)
    : nl_(&nl), shared_(!nl.is_network()), size_(grid.size()), truncation_(truncation) {
  if (shared_) {
    sections_.emplace_back(nl, Vector(grid.dim()));
  } else {
    sections_.reserve(static_cast<std::size_t>(grid.size()));
    for (Eigen::Index k = 0; k < grid.size(); ++k) sections_.emplace_back(nl, grid.point(k));
  }
}

GridFunction NodalNonlinearity::value(const Vector& y) const {
  GridFunction out(size_);
  for (Eigen::Index k = 0; k < size_; ++k) {
    const double yk = truncation_ ? std::clamp(y(k), -*truncation_, *truncation_) : y(k);
    out(k) = section(k).value(yk);
  }
  return out;
}

void NodalNonlinearity::one_sided(const Vector& y, Vector& left, Vector& right) const {
  left.resize(size_);
  right.resize(size_);
  for (Eigen::Index k = 0; k < size_; ++k) {
    const auto [l, r] = section(k).one_sided(y(k));
    left(k) = l;
    right(k) = r;
    if (truncation_) {
      const double level = *truncation_;
      if (y(k) > level || y(k) < -level) left(k) = right(k) = 0.0;
      if (y(k) == level) right(k) = 0.0;
      if (y(k) == -level) left(k) = 0.0;
    }
  }
}

GridFunction NodalNonlinearity::weak_gradient(const Vector& y) const {
  GridFunction out(size_);
  for (Eigen::Index k = 0; k < size_; ++k) out(k) = section(k).weak_gradient(y(k));
  return out;
}

GridFunction NodalNonlinearity::smoothed_value(const Smoothing& s, const Vector& y) const {
  GridFunction out(size_);
  if (s.kind == Smoothing::Kind::canonical) {
    for (Eigen::Index k = 0; k < size_; ++k) out(k) = section(k).canonical_value(s.epsilon, y(k));
    return out;
  }
  if (!moll_cache_ || moll_cache_->epsilon() != s.epsilon || moll_cache_->panels() != s.panels ||
      moll_cache_->nodes_per_panel() != s.nodes_per_panel)
    moll_cache_.emplace(s.epsilon, s.panels, s.nodes_per_panel);
  for (Eigen::Index k = 0; k < size_; ++k) out(k) = section(k).mollified_value(*moll_cache_, y(k));
  return out;
}

GridFunction NodalNonlinearity::smoothed_deriv(const Smoothing& s, const Vector& y) const {
  GridFunction out(size_);
  if (s.kind == Smoothing::Kind::canonical) {
    for (Eigen::Index k = 0; k < size_; ++k) out(k) = section(k).canonical_deriv(s.epsilon, y(k));
    return out;
  }
  if (!moll_cache_ || moll_cache_->epsilon() != s.epsilon || moll_cache_->panels() != s.panels ||
      moll_cache_->nodes_per_panel() != s.nodes_per_panel)
    moll_cache_.emplace(s.epsilon, s.panels, s.nodes_per_panel);
  for (Eigen::Index k = 0; k < size_; ++k) out(k) = section(k).mollified_deriv(*moll_cache_, y(k));
  return out;
}

double NodalNonlinearity::slope_bound() const {
  if (const auto* net = nl_->as_network()) {
    const auto& layers = net->layers();
    double bound = layers.front().weights.col(layers.front().weights.cols() - 1).norm();
    for (std::size_t l = 1; l < layers.size(); ++l) bound *= layers[l].weights.operatorNorm();
    return bound;
  }
  if (const auto* b = std::get_if<Builtin>(&nl_->repr())) {
    switch (b->kind) {
      case BuiltinKind::zero:
        return 0.0;
      case BuiltinKind::identity:
      case BuiltinKind::relu:
      case BuiltinKind::shifted_relu:
        return 1.0;
      case BuiltinKind::double_kink:
        return std::max({std::abs(b->s0), std::abs(b->s1), std::abs(b->s2)});
    }
  }
  const auto& t = std::get<KnotTable>(nl_->repr());
  double bound = std::max(std::abs(t.left_slope), std::abs(t.right_slope));
  for (std::size_t i = 0; i + 1 < t.knots.size(); ++i)
    bound = std::max(bound, std::abs((t.values[i + 1] - t.values[i]) / (t.knots[i + 1] - t.knots[i])));
  return bound;
}

// ---------------------------------------------------------------------------------------------
// Newton machinery

namespace {

// Nodewise map Phi(y) together with the slope used in the Newton matrix.
using NodalMap = std::function<void(const Vector& y, Vector& value, Vector* slope)>;

struct NewtonOutcome {
  GridFunction y;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  bool picard = false;
  std::vector<double> trace;
};

NewtonOutcome newton_solve(const Grid& grid, const NodalMap& phi, const Vector& rhs, Vector y, double tol,
                           const SolverOptions& opts, double lipschitz) {
  NewtonOutcome out;
  Vector value, slope, trial_value;
  auto residual_of = [&](const Vector& state, Vector& phi_value) {
    Vector g = apply_laplacian(grid, state);
    g += phi_value - rhs;
    return g;
  };

  phi(y, value, &slope);
  Vector g = residual_of(y, value);
  double res = norm_l2(grid, g);
  out.trace.push_back(res);

  for (int it = 0; it < opts.newton_max && res > tol; ++it) {
    ++out.iterations;
    bool accepted = false;
    if ((slope.array() >= 0.0).all()) {
      try {
        const Vector direction = solve_shifted_laplacian(grid, slope, -g, opts.cg_tol, opts.cg_max);
        for (double step = 1.0; step >= 1e-8; step *= 0.5) {
          const Vector trial = y + step * direction;
          phi(trial, trial_value, nullptr);
          const Vector trial_g = residual_of(trial, trial_value);
          const double trial_res = norm_l2(grid, trial_g);
          if (trial_res <= (1.0 - 1e-4 * step) * res) {
            y = trial;
            accepted = true;
            break;
          }
        }
      } catch (const ConvergenceError&) {
        accepted = false;
      }
    }
    if (!accepted) {
      // Picard: (-Delta_h + L) y+ = rhs - Phi(y) + L y.
      out.picard = true;
      const double shift = std::max(lipschitz, 1e-12);
      const Vector c = Vector::Constant(y.size(), shift);
      const Vector picard_rhs = rhs - value + shift * y;
      y = solve_shifted_laplacian(grid, c, picard_rhs, opts.cg_tol, opts.cg_max);
    }
    phi(y, value, &slope);
    g = residual_of(y, value);
    res = norm_l2(grid, g);
    out.trace.push_back(res);
  }
  out.y = std::move(y);
  out.residual = res;
  out.converged = res <= tol;
  return out;
}

void require_certified(const ControlProblem& problem) {
  if (!problem.nonlinearity().monotone_certified() && !problem.solver().acknowledge_nonmonotone)
    throw ParameterError(
        "nonlinearity is not monotone-certified; run check_monotone or set acknowledge_nonmonotone to proceed");
}

void require_finite(const Grid& grid, const Vector& v, const char* what) {
  grid.require(v.size(), what);
  if (!v.allFinite()) throw ParameterError(std::string(what) + " has non-finite entries");
}

}  // namespace

double state_linf_bound(const ControlProblem& problem, const Vector& u) {
  const auto& grid = problem.grid();
  NodalNonlinearity nodal(problem.nonlinearity(), grid);
  const Vector f0 = nodal.value(Vector::Zero(grid.size()));
  const Vector rhs = (u - f0).cwiseAbs();
  const Vector w =
      solve_shifted_laplacian(grid, Vector::Zero(grid.size()), rhs, problem.solver().cg_tol, problem.solver().cg_max);
  return norm_linf(w);
}

StateSolveResult solve_state(const ControlProblem& problem, const Vector& u, const Vector* initial_guess) {
  const auto& grid = problem.grid();
  const auto& opts = problem.solver();
  require_finite(grid, u, "control u");
  require_certified(problem);

  NodalNonlinearity nodal(problem.nonlinearity(), grid, opts.truncation_level);
  NodalMap phi = [&](const Vector& y, Vector& value, Vector* slope) {
    value = nodal.value(y);
    if (slope) {
      Vector left;
      nodal.one_sided(y, left, *slope);
    }
  };

  Vector y0 = initial_guess ? *initial_guess
                            : solve_shifted_laplacian(grid, Vector::Zero(grid.size()), u, opts.cg_tol, opts.cg_max);
  const double tol = opts.newton_tol * (1.0 + norm_l2(grid, u));
  auto outcome = newton_solve(grid, phi, u, std::move(y0), tol, opts, nodal.slope_bound());

  StateSolveResult result;
  result.iterations = outcome.iterations;
  result.final_residual = outcome.residual;
  result.picard_fallback = outcome.picard;
  result.residual_trace = outcome.trace;
  result.linf_bound_used = state_linf_bound(problem, u);
  if (!outcome.converged)
    throw ConvergenceError("state equation: Newton did not converge in " + std::to_string(opts.newton_max) +
                               " iterations",
                           outcome.residual, outcome.trace);
  if (opts.truncation_level && norm_linf(outcome.y) >= *opts.truncation_level) {
    result.truncation_active = true;
    throw TruncationError(norm_linf(outcome.y), *opts.truncation_level);
  }
  result.y = std::move(outcome.y);
  return result;
}

StateSolveResult solve_state_smoothed(const ControlProblem& problem, const Smoothing& smoothing, const Vector& u,
                                      const Vector* initial_guess) {
  const auto& grid = problem.grid();
  const auto& opts = problem.solver();
  require_finite(grid, u, "control u");
  require_certified(problem);
  if (!(smoothing.epsilon > 0.0)) throw ParameterError("smoothing epsilon must be positive");

  StateSolveResult result;
  // Canonical smoothing acts on the activation, so builtins are first realised as networks.
  const Nonlinearity converted = (smoothing.kind == Smoothing::Kind::canonical && !problem.nonlinearity().is_network())
                                     ? Nonlinearity::network(to_network(problem.nonlinearity(), grid.dim()))
                                     : problem.nonlinearity();
  NodalNonlinearity nodal(converted, grid);
  result.linf_bound_used = state_linf_bound(problem, u);

  if (smoothing.kind == Smoothing::Kind::canonical) {
    // Canonical smoothing need not preserve monotonicity: re-check on a node subsample.
    const double window = std::max(1.0, 2.0 * result.linf_bound_used);
    const Eigen::Index stride = std::max<Eigen::Index>(1, grid.size() / 64);
    double min_slope = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < grid.size(); k += stride)
      for (int i = 0; i <= 200; ++i)
        min_slope = std::min(min_slope, nodal.section(k).canonical_deriv(smoothing.epsilon, -window + window * i / 100.0));
    result.min_smoothed_slope = min_slope;
    if (min_slope < -1e-12)
      result.warnings.push_back("canonical smoothing is not monotone: min sampled slope " + std::to_string(min_slope));
  }

  NodalMap phi = [&](const Vector& y, Vector& value, Vector* slope) {
    value = nodal.smoothed_value(smoothing, y);
    if (slope) *slope = nodal.smoothed_deriv(smoothing, y);
  };
  Vector y0 = initial_guess ? *initial_guess
                            : solve_shifted_laplacian(grid, Vector::Zero(grid.size()), u, opts.cg_tol, opts.cg_max);
  const double tol = opts.newton_tol * (1.0 + norm_l2(grid, u));
  auto outcome = newton_solve(grid, phi, u, std::move(y0), tol, opts, nodal.slope_bound());
  result.iterations = outcome.iterations;
  result.final_residual = outcome.residual;
  result.picard_fallback = outcome.picard;
  result.residual_trace = outcome.trace;
  if (!outcome.converged)
    throw ConvergenceError("smoothed state equation: Newton did not converge", outcome.residual, outcome.trace);
  result.y = std::move(outcome.y);
  return result;
}

GridFunction solve_sensitivity(const ControlProblem& problem, const Vector& y, const Vector& h) {
  const auto& grid = problem.grid();
  const auto& opts = problem.solver();
  require_finite(grid, y, "state y");
  require_finite(grid, h, "direction h");
  if (h.isZero(0.0)) return GridFunction::Zero(grid.size());

  NodalNonlinearity nodal(problem.nonlinearity(), grid, opts.truncation_level);
  Vector left, right;
  nodal.one_sided(y, left, right);
  // z -> f'(y; z) is linear with slope f'_+ for z >= 0 and f'_- for z < 0.
  NodalMap phi = [&](const Vector& z, Vector& value, Vector* slope) {
    value.resize(z.size());
    if (slope) slope->resize(z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
      const double s = z(k) >= 0.0 ? right(k) : left(k);
      value(k) = s * z(k);
      if (slope) (*slope)(k) = s;
    }
  };
  const double lipschitz = std::max(left.cwiseAbs().maxCoeff(), right.cwiseAbs().maxCoeff());
  const double tol = opts.newton_tol * (1.0 + norm_l2(grid, h));
  auto outcome = newton_solve(grid, phi, h, Vector::Zero(grid.size()), tol, opts, lipschitz);
  if (!outcome.converged)
    throw ConvergenceError("sensitivity equation: Newton did not converge", outcome.residual, outcome.trace);
  return outcome.y;
}

GridFunction solve_adjoint(const ControlProblem& problem, const Vector& zeta, const Vector& rhs) {
  const auto& grid = problem.grid();
  grid.require(zeta.size(), "adjoint coefficient zeta");
  grid.require(rhs.size(), "adjoint right-hand side");
  if ((zeta.array() < 0.0).any()) throw ParameterError("solve_adjoint: zeta must be nonnegative");
  return solve_shifted_laplacian(grid, zeta, rhs, problem.solver().cg_tol, problem.solver().cg_max);
}

}  // namespace lipc
