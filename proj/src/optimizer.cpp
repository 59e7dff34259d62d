#include "lipc/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace lipc {

double tracking_objective(const ControlProblem& problem, const Vector& y, const Vector& u) {
  const auto& grid = problem.grid();
  const double misfit = norm_l2(grid, y - problem.target());
  const double control = norm_l2(grid, u);
  return 0.5 * misfit * misfit + 0.5 * problem.alpha() * control * control;
}

double reduced_objective(const ControlProblem& problem, const Vector& u) {
  return tracking_objective(problem, solve_state(problem, u).y, u);
}

SmoothedGradient smoothed_gradient(const ControlProblem& problem, const Smoothing& smoothing, const Vector& u,
                                   const Vector* state_guess) {
  SmoothedGradient out;
  out.y = solve_state_smoothed(problem, smoothing, u, state_guess).y;
  NodalNonlinearity nodal(problem.nonlinearity(), problem.grid());
  if (smoothing.kind == Smoothing::Kind::canonical && !problem.nonlinearity().is_network()) {
    const Nonlinearity net = Nonlinearity::network(to_network(problem.nonlinearity(), problem.grid().dim()));
    out.zeta = NodalNonlinearity(net, problem.grid()).smoothed_deriv(smoothing, out.y);
  } else {
    out.zeta = nodal.smoothed_deriv(smoothing, out.y);
  }
  // Canonical smoothing may produce slightly negative slopes; the adjoint needs zeta >= 0.
  const Vector c = out.zeta.cwiseMax(0.0);
  out.p = solve_adjoint(problem, c, out.y - problem.target());
  out.grad = out.p + problem.alpha() * u;
  out.objective = tracking_objective(problem, out.y, u);
  return out;
}

GridFunction project_box(const Vector& u, const Bounds& bounds) {
  return u.cwiseMax(bounds.lower).cwiseMin(bounds.upper);
}

GridFunction project(const ControlProblem& problem, const Vector& u) {
  return problem.bounds() ? project_box(u, *problem.bounds()) : GridFunction(u);
}

double natural_residual(const ControlProblem& problem, const Vector& u, const Vector& grad) {
  return norm_l2(problem.grid(), u - project(problem, u - grad));
}

RegularizedResult solve_regularized(const ControlProblem& problem, const Smoothing& smoothing, const Vector& u0,
                                    const RegularizedOptions& options) {
  const auto& grid = problem.grid();
  grid.require(u0.size(), "initial control u0");
  const StepRule& rule = options.step;

  RegularizedResult out;
  Vector u = project(problem, u0);
  SmoothedGradient cur = smoothed_gradient(problem, smoothing, u);
  double step = rule.initial_step;
  Vector prev_u, prev_grad;

  for (int it = 0;; ++it) {
    const double res = natural_residual(problem, u, cur.grad);
    out.history.push_back({smoothing.epsilon, it, cur.objective, res});
    if (res <= options.stop_tol) {
      out.iterations = it;
      out.natural_residual = res;
      break;
    }
    if (it >= options.max_iter) {
      std::vector<double> trace;
      for (const auto& row : out.history) trace.push_back(row.natural_residual);
      throw ConvergenceError("solve_regularized: iteration cap " + std::to_string(options.max_iter) + " reached",
                             res, trace);
    }

    if (rule.barzilai_borwein && it > 0) {
      const Vector du = u - prev_u;
      const Vector dg = cur.grad - prev_grad;
      const double curvature = inner_l2(grid, du, dg);
      step = curvature > 0.0 ? std::clamp(inner_l2(grid, du, du) / curvature, 1e-10, 1e10) : rule.initial_step;
    }

    bool accepted = false;
    for (int bt = 0; bt <= rule.max_backtracks; ++bt, step *= rule.backtrack) {
      const Vector trial = project(problem, u - step * cur.grad);
      SmoothedGradient next = smoothed_gradient(problem, smoothing, trial, &cur.y);
      const double decrease = rule.sufficient_decrease * inner_l2(grid, cur.grad, trial - u);
      // Rounding floor: near convergence J changes fall below its own precision.
      const double floor = 1e-14 * (1.0 + std::abs(cur.objective));
      if (next.objective <= cur.objective + decrease + floor) {
        prev_u = u;
        prev_grad = cur.grad;
        u = trial;
        cur = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::vector<double> trace;
      for (const auto& row : out.history) trace.push_back(row.natural_residual);
      throw ConvergenceError("solve_regularized: line search failed", res, trace);
    }
    if (!rule.barzilai_borwein) step = rule.initial_step;
  }
  out.u = std::move(u);
  out.last = std::move(cur);
  return out;
}

Multipliers extract_multipliers(const Vector& u, const Vector& p, double alpha, const Bounds& bounds) {
  Multipliers m;
  const Vector mu = -(p + alpha * u);
  m.mu_b = mu.cwiseMax(0.0);
  m.mu_a = (-mu).cwiseMax(0.0);
  m.complementarity_a = norm_linf(m.mu_a.cwiseProduct(bounds.lower - u));
  m.complementarity_b = norm_linf(m.mu_b.cwiseProduct(u - bounds.upper));
  return m;
}

std::vector<double> geometric_schedule(double eps_max, double eps_min, int levels) {
  if (levels < 1 || !(eps_max > 0.0) || !(eps_min > 0.0) || (levels > 1 && !(eps_min < eps_max)))
    throw ParameterError("geometric_schedule: need eps_max > eps_min > 0 and levels >= 1");
  std::vector<double> out;
  if (levels == 1) return {eps_max};
  const double ratio = std::pow(eps_min / eps_max, 1.0 / (levels - 1));
  for (int i = 0; i < levels; ++i) out.push_back(i + 1 == levels ? eps_min : eps_max * std::pow(ratio, i));
  return out;
}

PathFollowResult path_follow(const ControlProblem& problem, const Smoothing& family,
                             const std::vector<double>& eps_schedule, const Vector& u0,
                             const RegularizedOptions& options) {
  if (eps_schedule.empty()) throw ParameterError("path_follow: empty eps schedule");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0.0)) throw ParameterError("path_follow: eps values must be positive");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
      throw ParameterError("path_follow: eps schedule must be strictly decreasing");
  }
  const auto& grid = problem.grid();
  PathFollowResult out;
  out.epsilons = eps_schedule;

  Vector u = u0;
  SmoothedGradient last;
  Smoothing smoothing = family;
  for (std::size_t j = 0; j < eps_schedule.size(); ++j) {
    smoothing = family.with_epsilon(eps_schedule[j]);
    RegularizedResult level = solve_regularized(problem, smoothing, u, options);
    PathLevel rec;
    rec.eps = eps_schedule[j];
    rec.iterations = level.iterations;
    rec.natural_residual = level.natural_residual;
    rec.objective = level.last.objective;
    rec.increment = j == 0 ? 0.0 : norm_l2(grid, level.u - u);
    if (j >= 2 && rec.increment > out.levels.back().increment) out.non_cauchy = true;
    out.levels.push_back(rec);
    out.history.insert(out.history.end(), level.history.begin(), level.history.end());
    u = std::move(level.u);
    last = std::move(level.last);
  }
  if (out.non_cauchy) out.warnings.push_back("path increments grew along the eps schedule");

  out.u = u;
  out.y = solve_state(problem, u, &last.y).y;
  out.y_eps = last.y;
  out.zeta = last.zeta.cwiseMax(0.0);
  out.p = solve_adjoint(problem, out.zeta, out.y - problem.target());
  if (problem.bounds()) {
    Multipliers m = extract_multipliers(out.u, out.p, problem.alpha(), *problem.bounds());
    out.mu_a = std::move(m.mu_a);
    out.mu_b = std::move(m.mu_b);
    out.complementarity_a = m.complementarity_a;
    out.complementarity_b = m.complementarity_b;
  } else {
    out.mu_a = GridFunction::Zero(grid.size());
    out.mu_b = GridFunction::Zero(grid.size());
  }
  return out;
}

}  // namespace lipc
