#include "lipc/stationarity.hpp"

#include "lipc/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lipc {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::not_applicable:
      return "not_applicable";
  }
  return "not_applicable";
}

namespace {

enum class Side { none, lower, upper };

std::vector<Side> active_sides(const ControlProblem& problem, const Vector& u, double tol_act) {
  std::vector<Side> out(static_cast<std::size_t>(u.size()), Side::none);
  if (!problem.bounds()) return out;
  const auto& b = *problem.bounds();
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    if (u(k) <= b.lower(k) + tol_act)
      out[k] = Side::lower;
    else if (u(k) >= b.upper(k) - tol_act)
      out[k] = Side::upper;
  }
  return out;
}

void sign_correct(Vector& h, const std::vector<Side>& sides) {
  for (Eigen::Index k = 0; k < h.size(); ++k) {
    if (sides[k] == Side::lower) h(k) = std::max(h(k), 0.0);
    if (sides[k] == Side::upper) h(k) = std::min(h(k), 0.0);
  }
}

bool normalize(const Grid& grid, Vector& h) {
  const double n = norm_l2(grid, h);
  if (!(n > 0.0)) return false;
  h /= n;
  return true;
}

// F'(y; z) nodewise from precomputed one-sided slopes.
Vector directional_field(const Vector& left, const Vector& right, const Vector& z) {
  Vector out(z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) out(k) = (z(k) >= 0.0 ? right(k) : left(k)) * z(k);
  return out;
}

double exact_violation(double left, double right, double zeta, double p) {
  return std::max({right * p - zeta * p, zeta * p - left * p, 0.0});
}

}  // namespace

std::vector<Direction> sample_contingent_directions(const ControlProblem& problem, const Vector& u, int count,
                                                    std::uint64_t seed, double tol_act, const Vector* p) {
  if (count < 1) throw ParameterError("sample_contingent_directions: count must be >= 1");
  const auto& grid = problem.grid();
  grid.require(u.size(), "control u");
  const auto sides = active_sides(problem, u, tol_act);
  const CounterRng rng(seed, 0xD1EC7);
  std::vector<Direction> out;
  const auto m = static_cast<std::uint64_t>(grid.size());
  for (int j = 0; j < count; ++j) {
    Vector h(grid.size());
    for (Eigen::Index k = 0; k < grid.size(); ++k) h(k) = rng.normal_at(static_cast<std::uint64_t>(j) * m + k);
    sign_correct(h, sides);
    if (!normalize(grid, h)) h.setZero();
    out.push_back({"gaussian[" + std::to_string(j) + "]", std::move(h)});
  }
  if (p) {
    Vector h = -(*p + problem.alpha() * u);
    sign_correct(h, sides);
    if (normalize(grid, h)) out.push_back({"steepest_feasible_descent", std::move(h)});
  }
  return out;
}

double directional_objective_derivative(const ControlProblem& problem, const Vector& u, const Vector& y,
                                        const Vector& h) {
  const auto& grid = problem.grid();
  const Vector z = solve_sensitivity(problem, y, h);
  return inner_l2(grid, y - problem.target(), z) + problem.alpha() * inner_l2(grid, u, h);
}

double clarke_distance(const Section& section, double y, double zeta, double radius) {
  return section.clarke_window(y, radius).distance(zeta);
}

double strong_sign_residual(const Section& section, double y, double zeta, double p, double radius) {
  auto [left, right] = section.one_sided(y);
  double best = exact_violation(left, right, zeta, p);
  if (radius <= 0.0 || best == 0.0) return best;
  // Any point of the window may be the true state: take the most favourable slope pair.
  auto consider = [&](double l, double r) { best = std::min(best, exact_violation(l, r, zeta, p)); };
  for (double v : {y - radius, y + radius}) {
    const auto [l, r] = section.one_sided(v);
    consider(l, r);
  }
  for (double k : section.kinks(y - radius, y + radius, 4)) {
    const auto [l, r] = section.one_sided(k);
    consider(l, r);
    consider(l, l);
    consider(r, r);
  }
  return best;
}

void check_B(const ControlProblem& problem, const Vector& u, const Vector& y, const Vector* zeta, const Vector* p,
             StationarityReport& report) {
  const auto& grid = problem.grid();
  const auto& tol = report.tol;
  std::vector<Direction> dirs = sample_contingent_directions(problem, u, tol.directions, tol.seed, tol.tol_act, p);

  NodalNonlinearity nodal(problem.nonlinearity(), grid, problem.solver().truncation_level);
  Vector left, right;
  nodal.one_sided(y, left, right);
  const double w = grid.cell_measure();

  Vector adj_res, violation, grad;
  const bool have_adjoint = zeta && p;
  if (have_adjoint) {
    adj_res = apply_laplacian(grid, *p) + zeta->cwiseProduct(*p) - (y - problem.target());
    grad = *p + problem.alpha() * u;
    violation.resize(grid.size());
    for (Eigen::Index k = 0; k < grid.size(); ++k) violation(k) = exact_violation(left(k), right(k), (*zeta)(k), (*p)(k));

    // Unit kicks z = +-e_i at the worst sign violations: h = A z + F'(y; z) has S'(u; h) = z.
    const auto sides = active_sides(problem, u, tol.tol_act);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(grid.size()));
    for (Eigen::Index k = 0; k < grid.size(); ++k) order[k] = k;
    const std::size_t top = std::min<std::size_t>(4, order.size());
    std::partial_sort(order.begin(), order.begin() + top, order.end(),
                      [&](Eigen::Index a, Eigen::Index b) { return violation(a) > violation(b); });
    for (std::size_t r = 0; r < top; ++r) {
      const Eigen::Index i = order[r];
      if (!(violation(i) > 0.0)) break;
      const double zi = (*zeta)(i), pi = (*p)(i);
      for (double s : {1.0, -1.0}) {
        const double slope = s > 0.0 ? right(i) : left(i);
        if (!((s > 0.0 && slope * pi - zi * pi > 0.0) || (s < 0.0 && zi * pi - slope * pi > 0.0))) continue;
        Vector z = Vector::Zero(grid.size());
        z(i) = s;
        Vector h = apply_laplacian(grid, z);
        h(i) += slope * s;
        bool in_cone = true;
        for (Eigen::Index k = 0; k < h.size(); ++k)
          if ((sides[k] == Side::lower && h(k) < 0.0) || (sides[k] == Side::upper && h(k) > 0.0)) in_cone = false;
        if (!in_cone) continue;
        const double scale = norm_l2(grid, h);
        h /= scale;
        z /= scale;
        const double kink_term = w * pi * (zi * z(i) - slope * z(i));
        const double predicted =
            inner_l2(grid, grad, h) + kink_term + std::abs(inner_l2(grid, adj_res, z));
        const std::string id = "strong_witness[" + std::to_string(i) + (s > 0.0 ? ",+]" : ",-]");
        if (predicted < report.witness_prediction || report.witness_prediction_id.empty()) {
          report.witness_prediction = predicted;
          report.witness_prediction_id = id;
        }
        dirs.push_back({id, std::move(h)});
      }
    }
  }

  report.b_run = true;
  report.b_directions = static_cast<int>(dirs.size());
  report.b_min_directional = std::numeric_limits<double>::infinity();
  report.b_slack = 0.0;
  for (const auto& d : dirs) {
    const Vector z = solve_sensitivity(problem, y, d.h);
    const double value = inner_l2(grid, y - problem.target(), z) + problem.alpha() * inner_l2(grid, u, d.h);
    if (value < report.b_min_directional) {
      report.b_min_directional = value;
      report.b_witness = d.id;
    }
    if (have_adjoint) {
      // Lower bound from the adjoint identity: <p + alpha u, h> - sum w viol |z| - |<r, z>| - |<p, K(z) - h>|.
      const Vector sens_res = apply_laplacian(grid, z) + directional_field(left, right, z) - d.h;
      const double slack = std::max(0.0, -inner_l2(grid, grad, d.h)) + w * violation.dot(z.cwiseAbs()) +
                           std::abs(inner_l2(grid, adj_res, z)) + std::abs(inner_l2(grid, *p, sens_res));
      report.b_slack = std::max(report.b_slack, slack);
    }
  }
  report.b = report.b_min_directional >= -tol.tol_B ? Verdict::pass : Verdict::fail;
}

void check_weak(const ControlProblem& problem, const Vector& u, const Vector& y, const Vector& zeta, const Vector& p,
                StationarityReport& report) {
  const auto& grid = problem.grid();
  for (const Vector* v : {&u, &y, &zeta, &p}) grid.require(v->size(), "check_weak input");
  const Vector misfit = y - problem.target();
  const Vector r = apply_laplacian(grid, p) + zeta.cwiseProduct(p) - misfit;
  report.weak_run = true;
  report.adjoint_eq = norm_l2(grid, r) / (1.0 + norm_l2(grid, misfit));
  report.zeta_negativity = norm_linf(zeta.cwiseMin(0.0));
  const Vector grad = p + problem.alpha() * u;
  if (problem.bounds()) {
    const auto& b = *problem.bounds();
    const Vector mu = -grad;
    const Vector mu_b = mu.cwiseMax(0.0);
    const Vector mu_a = (-mu).cwiseMax(0.0);
    report.mu_system = true;
    report.mu_stationarity = norm_l2(grid, grad + mu_b - mu_a);
    report.mu_feasibility = norm_linf((b.lower - u).cwiseMax(0.0) + (u - b.upper).cwiseMax(0.0));
    report.mu_complementarity =
        std::max(norm_linf(mu_a.cwiseProduct(u - b.lower)), norm_linf(mu_b.cwiseProduct(b.upper - u)));
    report.mu_sign = std::max(norm_linf(mu_a.cwiseMin(0.0)), norm_linf(mu_b.cwiseMin(0.0)));
    report.vi_or_mu =
        std::max({report.mu_stationarity, report.mu_feasibility, report.mu_complementarity, report.mu_sign});
    report.mu = report.vi_or_mu <= report.tol.tol_weak ? Verdict::pass : Verdict::fail;
  } else {
    report.mu_system = false;
    report.vi_or_mu = norm_l2(grid, grad);
    report.mu = Verdict::not_applicable;
  }
  const double t = report.tol.tol_weak;
  report.weak = (report.adjoint_eq <= t && report.vi_or_mu <= t && report.zeta_negativity <= t) ? Verdict::pass
                                                                                               : Verdict::fail;
}

void check_C(const ControlProblem& problem, const Vector&, const Vector& y, const Vector& zeta,
             StationarityReport& report) {
  const auto& grid = problem.grid();
  grid.require(y.size(), "state y");
  grid.require(zeta.size(), "zeta");
  NodalNonlinearity nodal(problem.nonlinearity(), grid);
  report.c_run = true;
  report.c_inclusion_max = 0.0;
  report.c_witness_node = -1;
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const double d = clarke_distance(nodal.section(k), y(k), zeta(k), report.tol.kink_tol);
    if (d > report.c_inclusion_max) {
      report.c_inclusion_max = d;
      report.c_witness_node = static_cast<long>(k);
    }
  }
  report.c = report.c_inclusion_max <= report.tol.tol_C ? Verdict::pass : Verdict::fail;
}

void check_strong(const ControlProblem& problem, const Vector&, const Vector& y, const Vector& zeta,
                  const Vector& p, StationarityReport& report) {
  const auto& grid = problem.grid();
  grid.require(p.size(), "adjoint p");
  NodalNonlinearity nodal(problem.nonlinearity(), grid);
  report.strong_run = true;
  report.strong_sign_max = 0.0;
  report.strong_witness_node = -1;
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const double v = strong_sign_residual(nodal.section(k), y(k), zeta(k), p(k), report.tol.kink_tol);
    if (v > report.strong_sign_max) {
      report.strong_sign_max = v;
      report.strong_witness_node = static_cast<long>(k);
    }
  }
  report.strong = report.strong_sign_max <= report.tol.tol_strong ? Verdict::pass : Verdict::fail;
}

void check_cq(const ControlProblem& problem, const Vector& u, const Vector& y, StationarityReport& report) {
  const auto& grid = problem.grid();
  const auto sides = active_sides(problem, u, report.tol.tol_act);
  NodalNonlinearity nodal(problem.nonlinearity(), grid);
  const double kt = report.tol.kink_tol;
  const auto m = grid.size();

  std::vector<char> active(static_cast<std::size_t>(m), 0), dilated(static_cast<std::size_t>(m), 0);
  for (Eigen::Index k = 0; k < m; ++k) active[k] = sides[k] != Side::none;
  const int n0 = grid.nodes(0), n1 = grid.dim() == 2 ? grid.nodes(1) : 1;
  for (Eigen::Index k = 0; k < m; ++k) {
    if (!active[k]) continue;
    const auto [i0, i1] = grid.multi_index(k);
    for (int d1 = -1; d1 <= 1; ++d1)
      for (int d0 = -1; d0 <= 1; ++d0) {
        const int j0 = i0 + d0, j1 = i1 + d1;
        if (j0 >= 0 && j0 < n0 && j1 >= 0 && j1 < n1) dilated[grid.index(j0, j1)] = 1;
      }
  }
  Eigen::Index n_active = 0, n_f = 0, n_both = 0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const bool in_f = !nodal.section(k).kinks(y(k) - kt, y(k) + kt, 1).empty();
    n_active += active[k];
    n_f += in_f;
    n_both += (in_f && dilated[k]);
  }
  report.cq_run = true;
  report.active_set_fraction = static_cast<double>(n_active) / static_cast<double>(m);
  report.omega_f_fraction = static_cast<double>(n_f) / static_cast<double>(m);
  report.intersection_fraction = static_cast<double>(n_both) / static_cast<double>(m);
  report.cq_holds = n_active == 0;
  report.cqf_holds = n_both == 0;
}

void assemble_verdicts(StationarityReport& r) {
  r.implications.clear();
  const auto& t = r.tol;
  auto passed = [](Verdict v) { return v == Verdict::pass; };

  StationarityReport::Implication sb{"strong_implies_B", "not_applicable", ""};
  if (r.strong_run && r.weak_run && r.b_run) {
    if (passed(r.strong) && passed(r.weak)) {
      if (passed(r.b)) {
        sb.status = "consistent";
      } else if (r.b_min_directional >= -t.tol_B - r.b_slack) {
        sb.status = "consistent";
        sb.detail = "B deficit within the slack admitted by the strong and weak tolerances";
      } else {
        sb.status = "inconsistent";
        sb.detail = "B deficit exceeds the tolerance slack";
      }
    } else {
      sb.detail = "premise not met";
    }
  }
  r.implications.push_back(sb);

  // Both converse implications predict a strong pass; a measured strong failure is only a
  // contradiction if the B test could resolve it through the witness directions.
  auto converse = [&](StationarityReport::Implication& imp, bool premise) {
    if (!premise) {
      imp.detail = "premise not met";
      return;
    }
    if (passed(r.strong)) {
      imp.status = "consistent";
    } else if (!r.witness_prediction_id.empty() && r.witness_prediction < -t.tol_B) {
      imp.status = "inconsistent";
      imp.detail = "strong violation resolvable by " + r.witness_prediction_id + " yet B passed";
    } else {
      imp.status = "consistent";
      imp.detail = "strong violation below the resolution of the B directions";
    }
  };
  StationarityReport::Implication bcs{"B_C_CQf_implies_strong", "not_applicable", ""};
  if (r.b_run && r.c_run && r.cq_run && r.strong_run && r.weak_run)
    converse(bcs, passed(r.b) && passed(r.c) && passed(r.weak) && r.cqf_holds);
  r.implications.push_back(bcs);

  StationarityReport::Implication bs{"B_CQ_implies_strong", "not_applicable", ""};
  if (r.b_run && r.cq_run && r.strong_run)
    converse(bs, passed(r.b) && (r.cq_holds || (r.mu_system && r.omega_f_fraction == 0.0)));
  r.implications.push_back(bs);
}

bool StationarityReport::inconsistent() const {
  return std::any_of(implications.begin(), implications.end(),
                     [](const Implication& i) { return i.status == "inconsistent"; });
}

bool StationarityReport::all_pass(const std::vector<std::string>& requested) const {
  for (const auto& name : requested) {
    Verdict v = Verdict::not_applicable;
    if (name == "B") v = b;
    else if (name == "weak") v = (weak == Verdict::fail || mu == Verdict::fail) ? Verdict::fail : weak;
    else if (name == "C") v = c;
    else if (name == "strong") v = strong;
    else throw ParameterError("unknown stationarity condition \"" + name + "\"");
    if (v == Verdict::fail) return false;
  }
  return true;
}

int StationarityReport::exit_code(const std::vector<std::string>& requested) const {
  if (inconsistent()) return 3;
  return all_pass(requested) ? 0 : 2;
}

std::string StationarityReport::to_json(const CsvMetadata* meta) const {
  using json = nlohmann::ordered_json;
  auto node = [](long k) { return k < 0 ? json(nullptr) : json(k); };
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  if (meta) {
    json m = json::object();
    for (const auto& [k, v] : meta->entries) m[k] = v;
    j["meta"] = m;
  }
  j["B"] = {{"min_directional", b_run ? num(b_min_directional) : json(nullptr)},
            {"witness", b_run ? json(b_witness) : json(nullptr)},
            {"directions", b_directions},
            {"slack", num(b_slack)}};
  json weak_j = {{"adjoint_eq", num(adjoint_eq)},
                 {"vi_or_mu", num(vi_or_mu)},
                 {"zeta_negativity", num(zeta_negativity)},
                 {"mu_system", mu_system}};
  if (mu_system)
    weak_j["mu"] = {{"stationarity", num(mu_stationarity)},
                    {"feasibility", num(mu_feasibility)},
                    {"complementarity", num(mu_complementarity)},
                    {"sign", num(mu_sign)}};
  j["weak"] = weak_j;
  j["C"] = {{"inclusion_max", num(c_inclusion_max)}, {"witness_node", node(c_witness_node)}};
  j["strong"] = {{"sign_max", num(strong_sign_max)}, {"witness_node", node(strong_witness_node)}};
  j["cq"] = {{"active_set_fraction", num(active_set_fraction)},
             {"omega_f_fraction", num(omega_f_fraction)},
             {"intersection_fraction", num(intersection_fraction)},
             {"cq_holds", cq_holds},
             {"cqf_holds", cqf_holds},
             {"surrogate", "node fractions; closure of the active set taken as its one-node dilation"}};
  j["verdicts"] = {{"B", to_string(b)},
                   {"weak", to_string(weak)},
                   {"mu_system", to_string(mu)},
                   {"C", to_string(c)},
                   {"strong", to_string(strong)}};
  json imps = json::array();
  for (const auto& i : implications) imps.push_back({{"name", i.name}, {"status", i.status}, {"detail", i.detail}});
  j["implications"] = imps;
  j["witness_prediction"] = {{"direction", witness_prediction_id.empty() ? json(nullptr) : json(witness_prediction_id)},
                             {"value", witness_prediction_id.empty() ? json(nullptr) : num(witness_prediction)}};
  j["tolerances"] = {{"tol_B", tol.tol_B},         {"tol_weak", tol.tol_weak}, {"tol_C", tol.tol_C},
                     {"tol_strong", tol.tol_strong}, {"tol_act", tol.tol_act},   {"kink_tol", tol.kink_tol},
                     {"directions", tol.directions}, {"seed", tol.seed}};
  j["notes"] = notes;
  return j.dump(2) + "\n";
}

StationarityReport check_all(const ControlProblem& problem, const Vector& u, const Vector& y, const Vector& zeta,
                             const Vector& p, const StationarityTolerances& tol) {
  StationarityReport report;
  report.tol = tol;
  check_weak(problem, u, y, zeta, p, report);
  check_C(problem, u, y, zeta, report);
  check_strong(problem, u, y, zeta, p, report);
  check_cq(problem, u, y, report);
  check_B(problem, u, y, &zeta, &p, report);
  assemble_verdicts(report);
  return report;
}

}  // namespace lipc
