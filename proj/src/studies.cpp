#include "lipc/studies.hpp"

#include "lipc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lipc {

ScalarLaw approx_target(const ApproxStudyConfig& c) {
  if (c.target == "cubic") return {[](double y) { return y * y * y / 3.0; }, [](double y) { return y * y; }};
  const Nonlinearity nl = c.target == "relu"           ? Nonlinearity::relu()
                          : c.target == "shifted_relu" ? Nonlinearity::shifted_relu(c.t0)
                          : c.target == "double_kink"  ? Nonlinearity::double_kink(c.t0, c.t1, c.s0, c.s1, c.s2)
                                                       : throw ParameterError("unknown approx target " + c.target);
  // The section refers to the nonlinearity, so both are kept alive by the closures.
  auto owner = std::make_shared<Nonlinearity>(nl);
  auto sec = std::make_shared<Section>(*owner, Vector());
  return {[owner, sec](double y) { return sec->value(y); }, [owner, sec](double y) { return sec->weak_gradient(y); }};
}

GridFunction solve_scalar_law_state(const Grid& grid, const ScalarLaw& law, const Vector& u,
                                    const SolverOptions& opts) {
  auto residual = [&](const Vector& y) {
    Vector g = apply_laplacian(grid, y);
    for (Eigen::Index k = 0; k < y.size(); ++k) g(k) += law.value(y(k)) - u(k);
    return g;
  };
  Vector y = solve_shifted_laplacian(grid, Vector::Zero(grid.size()), u, opts.cg_tol, opts.cg_max);
  Vector g = residual(y);
  double res = norm_l2(grid, g);
  std::vector<double> trace{res};
  const double tol = opts.newton_tol * (1.0 + norm_l2(grid, u));
  for (int it = 0; it < opts.newton_max && res > tol; ++it) {
    Vector c(y.size());
    for (Eigen::Index k = 0; k < y.size(); ++k) c(k) = std::max(0.0, law.slope(y(k)));
    const Vector d = solve_shifted_laplacian(grid, c, -g, opts.cg_tol, opts.cg_max);
    double step = 1.0;
    for (; step >= 1e-10; step *= 0.5) {
      const Vector trial = y + step * d;
      const Vector tg = residual(trial);
      const double tr = norm_l2(grid, tg);
      if (tr <= (1.0 - 1e-4 * step) * res) {
        y = trial;
        g = tg;
        res = tr;
        break;
      }
    }
    trace.push_back(res);
    if (step < 1e-10) break;
  }
  if (!(res <= tol)) throw ConvergenceError("scalar-law state equation did not converge", res, trace);
  return y;
}

// ---------------------------------------------------------------------------------------------
// Approximation study

ApproxStudyResult run_approx_study(const ControlProblem& problem, const ExperimentConfig& config) {
  const ApproxStudyConfig& a = config.approx;
  const Grid& grid = problem.grid();
  const ScalarLaw law = approx_target(a);
  const Vector u = realize(a.control, grid);
  const double M = a.window;

  // Reference state with the ground-truth law.
  GridFunction y_ref;
  std::optional<Nonlinearity> exact;
  if (a.target == "relu") exact = Nonlinearity::relu();
  if (a.target == "shifted_relu") exact = Nonlinearity::shifted_relu(a.t0);
  if (a.target == "double_kink") exact = Nonlinearity::double_kink(a.t0, a.t1, a.s0, a.s1, a.s2);
  if (exact)
    y_ref = solve_state(problem.with_nonlinearity(*exact), u).y;
  else
    y_ref = solve_scalar_law_state(grid, law, u, problem.solver());

  ApproxStudyResult out;
  std::vector<GridFunction> controls, states;
  for (double delta : a.spacings) {
    const int K = static_cast<int>(std::ceil(M / delta - 1e-12));
    std::vector<double> knots, values;
    for (int i = -K; i <= K; ++i) {
      knots.push_back(i * delta);
      values.push_back(law.value(i * delta));
    }
    // End slopes continue the law's one-sided slopes outside the knot range.
    const double left = law.slope(knots.front() - 0.5 * delta);
    const double right = law.slope(knots.back() + 0.5 * delta);
    Nonlinearity net = Nonlinearity::network(construct_interpolant_net(knots, values, {left, right}, grid.dim()));

    ApproxRow row;
    row.delta = delta;
    row.knots = static_cast<int>(knots.size());
    const Section sec(net, grid.point(0));
    for (int j = 0; j < a.dense_points; ++j) {
      const double y = -M + 2.0 * M * j / (a.dense_points - 1);
      row.sup_error = std::max(row.sup_error, std::abs(sec.value(y) - law.value(y)));
      row.slope_error = std::max(row.slope_error, std::abs(sec.weak_gradient(y) - law.slope(y)));
    }
    row.w1inf_error = std::max(row.sup_error, row.slope_error);

    const ControlProblem level = problem.with_nonlinearity(net);
    const GridFunction y_n = solve_state(level, u).y;
    const Vector diff = y_n - y_ref;
    row.state_h1 = norm_h1(grid, diff);
    row.state_Y = norm_Y(grid, diff);
    row.state_holder = holder_seminorm(grid, diff, a.holder_exponent, 200000, config.seed);

    if (a.optimize) {
      const auto& o = config.optimize;
      const Vector u0 = realize(o.initial_control, grid);
      PathFollowResult pf = path_follow(level, o.smoothing, o.eps_schedule, u0, o.options);
      controls.push_back(pf.u);
      states.push_back(pf.y);
    }
    out.rows.push_back(row);
  }
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    if (a.optimize) {
      out.rows[i].control_l2 = norm_l2(grid, controls[i] - controls.back());
      out.rows[i].opt_state_h1 = norm_h1(grid, states[i] - states.back());
    } else {
      out.rows[i].control_l2 = std::numeric_limits<double>::quiet_NaN();
      out.rows[i].opt_state_h1 = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

std::string ApproxStudyResult::csv(const CsvMetadata& meta) const {
  std::ostringstream s;
  s << "delta,knots,sup_error,slope_error,w1inf_error,state_h1,state_Y,state_holder,control_l2,opt_state_h1\n";
  for (const auto& r : rows)
    s << format_double(r.delta) << ',' << r.knots << ',' << format_double(r.sup_error) << ','
      << format_double(r.slope_error) << ',' << format_double(r.w1inf_error) << ',' << format_double(r.state_h1) << ','
      << format_double(r.state_Y) << ',' << format_double(r.state_holder) << ',' << format_double(r.control_l2) << ','
      << format_double(r.opt_state_h1) << '\n';
  s << meta.render();
  return s.str();
}

// ---------------------------------------------------------------------------------------------
// Mollifier study

MollifierStudyResult run_mollifier_study(const Nonlinearity& nl, const MollifierStudyConfig& config,
                                         std::uint64_t seed) {
  if (nl.is_network()) throw ParameterError("mollifier study needs a 1-D nonlinearity with listed kinks");
  const std::vector<double> kinks = nl.explicit_kinks();
  if (kinks.empty()) throw ParameterError("mollifier study: nonlinearity has no kinks");
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < kinks.size(); ++i) gap = std::min(gap, kinks[i + 1] - kinks[i]);
  const double r = config.radius.value_or(std::min(1.0, 0.45 * gap));
  if (kinks.size() > 1 && !(r < 0.5 * gap))
    throw ParameterError("mollifier study: radius must stay below half the kink gap");

  static const char* schemes[] = {"right", "left", "oscillating", "on_kink"};
  const Section sec(nl, Vector());
  MollifierStudyResult out;
  for (double kink : kinks) {
    const Interval clarke = sec.clarke(kink);
    for (int s = 0; s < config.sequences; ++s) {
      const CounterRng rng(seed, static_cast<std::uint64_t>(s));
      const double c = r * (0.25 + 0.25 * rng.uniform_at(0));
      const std::string scheme = schemes[s % 4];
      std::vector<double> derivs;
      for (int n = 1; n <= config.terms; ++n) {
        double offset = 0.0;
        if (scheme == "right") offset = c / n;
        if (scheme == "left") offset = -c / n;
        if (scheme == "oscillating") offset = (n % 2 ? -c : c) / n;
        const double eps = r / (2.0 * std::pow(static_cast<double>(n), config.eps_power));
        const Mollifier moll(eps);
        MollifierRow row;
        row.kink = kink;
        row.sequence = s;
        row.scheme = scheme;
        row.n = n;
        row.y = kink + offset;
        row.eps = eps;
        row.deriv = sec.mollified_deriv(moll, row.y);
        row.clarke_lo = clarke.lo;
        row.clarke_hi = clarke.hi;
        derivs.push_back(row.deriv);
        const auto tail = derivs.begin() + (n / 2);
        row.limsup = *std::max_element(tail, derivs.end());
        row.liminf = *std::min_element(tail, derivs.end());
        row.in_interval = clarke.contains(row.deriv, 1e-8);
        out.all_in_interval = out.all_in_interval && row.in_interval;
        if (n == config.terms) {
          out.limsup_ok = out.limsup_ok && row.limsup <= clarke.hi + 1e-8;
          out.liminf_ok = out.liminf_ok && row.liminf >= clarke.lo - 1e-8;
        }
        out.rows.push_back(std::move(row));
      }
    }
  }
  return out;
}

std::string MollifierStudyResult::csv(const CsvMetadata& meta) const {
  std::ostringstream s;
  s << "kink,sequence,scheme,n,y,eps,deriv,clarke_lo,clarke_hi,limsup,liminf,in_interval\n";
  for (const auto& r : rows)
    s << format_double(r.kink) << ',' << r.sequence << ',' << r.scheme << ',' << r.n << ',' << format_double(r.y)
      << ',' << format_double(r.eps) << ',' << format_double(r.deriv) << ',' << format_double(r.clarke_lo) << ','
      << format_double(r.clarke_hi) << ',' << format_double(r.limsup) << ',' << format_double(r.liminf) << ','
      << (r.in_interval ? "true" : "false") << '\n';
  CsvMetadata m = meta;
  m.add("all_in_interval", all_in_interval ? "true" : "false");
  m.add("limsup_ok", limsup_ok ? "true" : "false");
  m.add("liminf_ok", liminf_ok ? "true" : "false");
  s << m.render();
  return s.str();
}

}  // namespace lipc
