#include "lq_oracle.hpp"

#include "lipc/optimizer.hpp"
#include "lipc/stationarity.hpp"

#include <doctest.h>

#include <cmath>

using namespace lipc;

namespace {

const Grid small = Grid::unit_square(15);

Vector target(const Grid& g) {
  return sample(g, [](const Vector& x) { return 2.0 * std::sin(M_PI * x(0)) * x(1) - 0.3; });
}

Vector noise(const Grid& g, std::uint64_t seed) {
  CounterRng rng(seed, 6);
  Vector v(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) v(i) = rng.next_normal();
  return v;
}

ControlProblem lq(std::optional<Bounds> b = {}) {
  return ControlProblem(small, Nonlinearity::zero(), target(small), 1e-3, std::move(b));
}

struct Triple {
  Vector u, y, zeta, p;
};

Triple lq_triple(const ControlProblem& p, const Vector& u) {
  const Vector y = solve_state(p, u).y;
  const Vector zeta = Vector::Zero(u.size());
  return {u, y, zeta, solve_adjoint(p, zeta, y - p.target())};
}

}  // namespace

TEST_CASE("contingent directions") {
  const ControlProblem free = lq();
  const Vector u = noise(small, 1);
  const auto d = sample_contingent_directions(free, u, 5, 3, 1e-8);
  REQUIRE(d.size() == 5);
  for (const auto& h : d) CHECK(norm_l2(small, h.h) == doctest::Approx(1.0));
  CHECK(d[0].h.minCoeff() < 0.0);
  // determinism
  CHECK(sample_contingent_directions(free, u, 5, 3, 1e-8)[4].h == d[4].h);

  const Vector ua = Vector::Constant(small.size(), -1.0), ub = Vector::Constant(small.size(), 1.0);
  const ControlProblem boxed = lq(Bounds{ua, ub});
  for (const auto& h : sample_contingent_directions(boxed, ua, 10, 4, 1e-8)) CHECK(h.h.minCoeff() >= 0.0);

  Vector mixed = Vector::Zero(small.size());
  for (Eigen::Index k = 0; k < small.size(); ++k) mixed(k) = k % 3 == 0 ? -1.0 : (k % 3 == 1 ? 1.0 : 0.2);
  const Vector p = noise(small, 2);
  for (const auto& h : sample_contingent_directions(boxed, mixed, 10, 5, 1e-8, &p))
    for (Eigen::Index k = 0; k < small.size(); ++k) {
      if (k % 3 == 0) CHECK(h.h(k) >= 0.0);
      if (k % 3 == 1) CHECK(h.h(k) <= 0.0);
    }
  CHECK(sample_contingent_directions(boxed, mixed, 2, 5, 1e-8, &p).back().id == "steepest_feasible_descent");
}

TEST_CASE("directional derivative and check_B on the LQ problem") {
  const ControlProblem p = lq();
  const test::LqOracle o(small, p.target(), p.alpha());
  const Vector ustar = o.unconstrained();
  const Vector y = solve_state(p, ustar).y;
  for (std::uint64_t s = 0; s < 5; ++s) {
    Vector h = noise(small, 10 + s);
    h /= norm_l2(small, h);
    CHECK(std::abs(directional_objective_derivative(p, ustar, y, h)) < 1e-6);
  }
  CHECK(directional_objective_derivative(p, ustar, y, Vector::Zero(small.size())) == 0.0);

  StationarityReport r;
  check_B(p, ustar, y, nullptr, nullptr, r);
  CHECK(r.b == Verdict::pass);
  CHECK(r.b_directions == 50);

  const Vector u1 = ustar + 0.1 * noise(small, 3);
  const Vector y1 = solve_state(p, u1).y;
  Vector g = o.gradient(u1);
  CHECK(directional_objective_derivative(p, u1, y1, -g / norm_l2(small, g)) < 0.0);
  StationarityReport bad;
  const Vector p1 = solve_adjoint(p, Vector::Zero(small.size()), y1 - p.target());
  const Vector z0 = Vector::Zero(small.size());
  check_B(p, u1, y1, &z0, &p1, bad);
  CHECK(bad.b == Verdict::fail);
  CHECK(bad.b_witness == "steepest_feasible_descent");
  CHECK(bad.b_min_directional < -1e-6);
}

TEST_CASE("B directional derivative is positively homogeneous") {
  const ControlProblem p(small, Nonlinearity::relu(), target(small), 1e-2);
  const Vector ystar = test::kink_band_state(small);
  const Vector u = test::control_for_max_state(small, ystar);
  const Vector h = noise(small, 8);
  const double d = directional_objective_derivative(p, u, ystar, h);
  for (double t : {0.1, 2.0, 50.0})
    CHECK(directional_objective_derivative(p, u, ystar, t * h) == doctest::Approx(t * d).epsilon(1e-10));
}

TEST_CASE("check_weak") {
  SUBCASE("zero solution") {
    const ControlProblem p(small, Nonlinearity::relu(), Vector::Zero(small.size()), 1.0);
    const Vector z = Vector::Zero(small.size());
    StationarityReport r;
    check_weak(p, z, z, z, z, r);
    CHECK(r.adjoint_eq == 0.0);
    CHECK(r.vi_or_mu == 0.0);
    CHECK(r.zeta_negativity == 0.0);
    CHECK(r.weak == Verdict::pass);
    CHECK(r.mu == Verdict::not_applicable);
  }
  SUBCASE("LQ path triple") {
    const ControlProblem p = lq();
    RegularizedOptions o;
    o.stop_tol = 1e-10;
    const PathFollowResult pf = path_follow(p, Smoothing::mollified(0.1), {0.1, 0.01}, Vector::Zero(small.size()), o);
    StationarityReport r;
    check_weak(p, pf.u, pf.y, pf.zeta, pf.p, r);
    CHECK(r.adjoint_eq <= 1e-6);
    CHECK(r.vi_or_mu <= 1e-6);
    CHECK(r.weak == Verdict::pass);
  }
  SUBCASE("negative zeta is flagged") {
    const ControlProblem p = lq();
    const Triple t = lq_triple(p, noise(small, 4));
    Vector zeta = t.zeta;
    zeta(7) = -0.25;
    StationarityReport r;
    check_weak(p, t.u, t.y, zeta, t.p, r);
    CHECK(r.zeta_negativity == 0.25);
    CHECK(r.weak == Verdict::fail);
  }
}

TEST_CASE("check_C and check_strong") {
  const Vector ystar = test::kink_band_state(small);
  const ControlProblem p(small, Nonlinearity::relu(), target(small), 1e-2);
  const Vector u = test::control_for_max_state(small, ystar);

  SUBCASE("differentiable nonlinearity: residual is |zeta - f'|") {
    const ControlProblem q = p.with_nonlinearity(Nonlinearity::identity());
    Vector zeta = Vector::Ones(small.size());
    zeta(3) = 1.4;
    zeta(9) = 0.8;
    StationarityReport r;
    check_C(q, u, ystar, zeta, r);
    CHECK(r.c_inclusion_max == doctest::Approx(0.4));
    CHECK(r.c_witness_node == 3);
    const Vector pp = Vector::Ones(small.size());
    check_strong(q, u, ystar, Vector::Ones(small.size()), pp, r);
    CHECK(r.strong_sign_max == 0.0);
  }
  SUBCASE("zeta outside the Clarke interval") {
    Vector zeta = ystar.unaryExpr([](double v) { return v > 0 ? 1.0 : 0.0; });
    Eigen::Index kink = -1;
    for (Eigen::Index k = 0; k < ystar.size(); ++k)
      if (ystar(k) == 0.0) kink = k;
    REQUIRE(kink >= 0);
    zeta(kink) = 2.0;
    StationarityReport r;
    check_C(p, u, ystar, zeta, r);
    CHECK(r.c_inclusion_max == 1.0);
    CHECK(r.c == Verdict::fail);
    CHECK(r.c_witness_node == kink);
  }
  SUBCASE("sign condition at a kink of max") {
    const Vector zeta = Vector::Constant(small.size(), 0.5);
    Vector pp = Vector::Zero(small.size());
    Eigen::Index kink = -1;
    for (Eigen::Index k = 0; k < ystar.size(); ++k)
      if (ystar(k) == 0.0) kink = k;
    pp(kink) = 1.0;  // needs 1 <= zeta <= 0: impossible
    StationarityReport r;
    check_strong(p, u, ystar, zeta, pp, r);
    CHECK(r.strong_sign_max == doctest::Approx(0.5));
    CHECK(r.strong_witness_node == kink);
    CHECK(r.strong == Verdict::fail);
    check_strong(p, u, ystar, zeta, Vector::Zero(small.size()), r);
    CHECK(r.strong_sign_max == 0.0);
  }
}

TEST_CASE("check_cq") {
  SUBCASE("no bounds, smooth nonlinearity") {
    const ControlProblem p = lq();
    const Triple t = lq_triple(p, noise(small, 5));
    StationarityReport r;
    check_cq(p, t.u, t.y, r);
    CHECK(r.cq_holds);
    CHECK(r.cqf_holds);
    CHECK(r.omega_f_fraction == 0.0);
  }
  SUBCASE("half the domain clamped") {
    const Vector ua = Vector::Constant(small.size(), -1.0), ub = Vector::Constant(small.size(), 1.0);
    const ControlProblem p(small, Nonlinearity::relu(), target(small), 1e-2, Bounds{ua, ub});
    const Vector u = sample(small, [](const Vector& x) { return x(0) < 0.5 ? 1.0 : 0.3; });
    const Vector ystar = test::kink_band_state(small);
    StationarityReport r;
    check_cq(p, u, ystar, r);
    CHECK(r.active_set_fraction == doctest::Approx(0.5).epsilon(0.1));
    CHECK_FALSE(r.cq_holds);
    CHECK(r.omega_f_fraction > 0.0);
    CHECK_FALSE(r.cqf_holds);
  }
}

TEST_CASE("assembled verdicts") {
  SUBCASE("LQ optimum: all pass, consistent") {
    const ControlProblem p = lq();
    const test::LqOracle o(small, p.target(), p.alpha());
    const Triple t = lq_triple(p, o.unconstrained());
    StationarityTolerances tol;
    const StationarityReport r = check_all(p, t.u, t.y, t.zeta, t.p, tol);
    CHECK(r.all_pass({"B", "weak", "C", "strong"}));
    CHECK_FALSE(r.inconsistent());
    CHECK(r.exit_code({"B", "weak", "C", "strong"}) == 0);
    CHECK(r.mu == Verdict::not_applicable);
    CHECK(r.to_json() == check_all(p, t.u, t.y, t.zeta, t.p, tol).to_json());
    const std::string js = r.to_json();
    CHECK(js.find("\"B\"") < js.find("\"weak\""));
    CHECK(js.find("\"weak\"") < js.find("\"C\""));
    CHECK(js.find("\"verdicts\"") < js.find("\"implications\""));
  }
  SUBCASE("strong failure with a resolvable witness and B pass is an inconsistency") {
    StationarityReport r;
    r.b_run = r.c_run = r.weak_run = r.strong_run = r.cq_run = true;
    r.b = r.c = r.weak = Verdict::pass;
    r.strong = Verdict::fail;
    r.cqf_holds = true;
    r.cq_holds = false;
    r.witness_prediction = -1.0;
    r.witness_prediction_id = "strong_witness[3,+]";
    assemble_verdicts(r);
    CHECK(r.inconsistent());
    CHECK(r.exit_code({"B"}) == 3);
    r.witness_prediction = -1e-9;
    assemble_verdicts(r);
    CHECK_FALSE(r.inconsistent());
    CHECK(r.exit_code({"strong"}) == 2);
  }
  SUBCASE("strong pass with a B failure beyond the slack is an inconsistency") {
    StationarityReport r;
    r.b_run = r.weak_run = r.strong_run = true;
    r.strong = r.weak = Verdict::pass;
    r.b = Verdict::fail;
    r.b_min_directional = -1.0;
    r.b_slack = 1e-3;
    assemble_verdicts(r);
    CHECK(r.implications[0].status == "inconsistent");
  }
}

TEST_CASE("strong implies B over 100 directions") {
  const Vector ua = Vector::Constant(small.size(), -30.0), ub = Vector::Constant(small.size(), 30.0);
  for (const Nonlinearity& nl : {Nonlinearity::relu(), Nonlinearity::double_kink(-0.1, 0.2, 0.2, 1.0, 3.0)}) {
    const ControlProblem p(small, nl, target(small), 1e-2, Bounds{ua, ub});
    RegularizedOptions o;
    o.stop_tol = 1e-10;
    o.max_iter = 50000;
    const PathFollowResult pf =
        path_follow(p, Smoothing::mollified(0.1), geometric_schedule(1e-1, 1e-4, 6), Vector::Zero(small.size()), o);
    StationarityTolerances tol;
    tol.directions = 100;
    tol.kink_tol = 1e-4 + norm_linf(pf.y - pf.y_eps);
    const StationarityReport r = check_all(p, pf.u, pf.y, pf.zeta, pf.p, tol);
    CHECK_FALSE(r.inconsistent());
    if (r.strong == Verdict::pass && r.weak == Verdict::pass) CHECK(r.b_min_directional >= -10 * tol.tol_B);
  }
}

TEST_CASE("C residual does not grow as eps_min decreases") {
  const ControlProblem p(Grid::unit_square(15), Nonlinearity::relu(), target(small), 1e-2);
  RegularizedOptions o;
  o.stop_tol = 1e-10;
  o.max_iter = 50000;
  double prev = -1.0;
  for (double eps_min : {1e-2, 1e-3, 1e-4}) {
    const PathFollowResult pf =
        path_follow(p, Smoothing::mollified(0.1), geometric_schedule(1e-1, eps_min, 4), Vector::Zero(small.size()), o);
    StationarityTolerances tol;
    tol.kink_tol = eps_min + norm_linf(pf.y - pf.y_eps);
    StationarityReport r;
    r.tol = tol;
    check_C(p, pf.u, pf.y, pf.zeta, r);
    if (prev >= 0.0) CHECK(r.c_inclusion_max <= 2.0 * prev + 1e-12);
    prev = r.c_inclusion_max;
  }
}
