#include "helpers.hpp"

#include "lipc/network_io.hpp"
#include "lipc/quadrature.hpp"
#include "lipc/train.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include <cmath>

using namespace lipc;
using lipc::test::random_net;

namespace {
const Vector x0 = Vector::Zero(1);
const Vector none = Vector();

// eps * int_0^1 rho(t) t dt with rho the unit mollifier, frozen from a 30-digit quadrature.
constexpr double kMollifiedMaxAtZero = 0.16722699885498766;
}  // namespace

TEST_CASE("eval: max net, zero, random nets vs naive recursion") {
  const Nonlinearity m = Nonlinearity::network(test::max_net(1));
  CHECK(eval(m, x0, -2.0) == 0.0);
  CHECK(eval(m, x0, 3.0) == 3.0);
  CHECK(eval(Nonlinearity::zero(), none, 5.0) == 0.0);

  for (std::uint64_t s = 0; s < 5; ++s) {
    const ReluNetwork net = random_net(s, {3, 7, 5, 1});
    const Nonlinearity nl = Nonlinearity::network(net);
    CounterRng rng(s, 1);
    for (int k = 0; k < 50; ++k) {
      Vector x(2);
      x << rng.next_uniform(), rng.next_uniform();
      const double y = 4.0 * rng.next_uniform() - 2.0;
      CHECK(eval(nl, x, y) == doctest::Approx(test::naive_eval(net, {x(0), x(1), y})).epsilon(1e-12));
    }
  }
}

TEST_CASE("eval: dimension mismatch is structured") {
  const Nonlinearity nl = Nonlinearity::network(random_net(1, {3, 4, 1}));
  try {
    eval(nl, Vector::Zero(1), 0.0);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(e.expected() == 2);
    CHECK(e.actual() == 1);
  }
}

TEST_CASE("dir_deriv and one-sided derivatives") {
  const Nonlinearity m = Nonlinearity::network(test::max_net(1));
  CHECK(dir_deriv(m, x0, 0.0, 1.0) == 1.0);
  CHECK(dir_deriv(m, x0, 0.0, -1.0) == 0.0);
  CHECK(one_sided_derivs(m, x0, 0.0) == std::pair{0.0, 1.0});
  CHECK(one_sided_derivs(Nonlinearity::identity(), none, 0.3) == std::pair{1.0, 1.0});
  CHECK(one_sided_derivs(Nonlinearity::double_kink(0, 1, 0, 0.5, 2), none, 1.0) == std::pair{0.5, 2.0});

  // Off kinks the derivative is linear in h.
  const Nonlinearity nl = Nonlinearity::network(random_net(3, {2, 6, 6, 1}));
  for (double y : {-1.3, 0.2, 0.9}) {
    const double d1 = dir_deriv(nl, x0, y, 1.0);
    CHECK(dir_deriv(nl, x0, y, -2.5) == doctest::Approx(-2.5 * d1).epsilon(1e-14));
  }
}

TEST_CASE("dir_deriv matches one-sided difference quotients at a kink of a deep net") {
  // Zero first-layer biases and x = 0: all first-layer preactivations vanish at y = 0.
  for (std::uint64_t s = 0; s < 8; ++s) {
    const ReluNetwork net = random_net(100 + s, {2, 6, 5, 4, 1}, true);
    const Nonlinearity nl = Nonlinearity::network(net);
    const Section sec(nl, x0);
    const double t = 1e-7;
    for (double h : {1.0, -1.0, 0.37, -2.0}) {
      const double fd = (sec.value(h * t) - sec.value(0.0)) / t;
      CHECK(sec.dir_deriv(0.0, h) == doctest::Approx(fd).epsilon(1e-6));
    }
    // Positive homogeneity is exact.
    for (double tau : {0.5, 3.0, 1e3}) CHECK(sec.dir_deriv(0.0, tau * 0.7) == doctest::Approx(tau * sec.dir_deriv(0.0, 0.7)).epsilon(1e-14));
    const auto [lo, hi] = sec.one_sided(0.0);
    CHECK(lo == doctest::Approx(-sec.dir_deriv(0.0, -1.0)));
    CHECK(hi == doctest::Approx(sec.dir_deriv(0.0, 1.0)));
  }
}

TEST_CASE("clarke_interval") {
  const Interval c = clarke_interval(Nonlinearity::relu(), none, 0.0);
  CHECK(c.lo == 0.0);
  CHECK(c.hi == 1.0);
  const Interval d = clarke_interval(Nonlinearity::relu(), none, 2.0);
  CHECK(d.lo == d.hi);
  const Nonlinearity kt = Nonlinearity::knot_table({0.0}, {0.0}, 2.0, 0.5);
  const Interval k = clarke_interval(kt, none, 0.0);
  CHECK(k.lo == 0.5);
  CHECK(k.hi == 2.0);
}

TEST_CASE("weak gradient") {
  const Nonlinearity m = Nonlinearity::network(test::max_net(1));
  CHECK(weak_gradient_y(m, x0, -1.0) == 0.0);
  CHECK(weak_gradient_y(m, x0, 1.0) == 1.0);
  CHECK(weak_gradient_y(m, x0, 0.0) == 0.0);

  const Nonlinearity nl = Nonlinearity::network(random_net(7, {2, 8, 8, 1}));
  const Section sec(nl, x0);
  for (double y : {-1.7, -0.4, 0.33, 1.2}) {
    if (!sec.affine_on(y - 1e-5, y + 1e-5)) continue;
    const double t = 1e-6;
    CHECK(sec.weak_gradient(y) == doctest::Approx((sec.value(y + t) - sec.value(y - t)) / (2 * t)).epsilon(1e-7));
  }
}

TEST_CASE("affine window and kinks") {
  const Nonlinearity dk = Nonlinearity::double_kink(-0.5, 1.0, 0.2, 1.0, 3.0);
  const Section s(dk, none);
  CHECK(s.affine_on(0.0, 0.9));
  CHECK_FALSE(s.affine_on(0.0, 1.1));
  const auto k = s.kinks(-2, 2);
  REQUIRE(k.size() == 2);
  CHECK(k[0] == -0.5);
  CHECK(k[1] == 1.0);

  const Nonlinearity nl = Nonlinearity::network(random_net(9, {2, 5, 1}, true));
  const Section sn(nl, x0);
  const auto kn = sn.kinks(-1, 1);
  bool has_zero = false;
  for (double v : kn) has_zero = has_zero || std::abs(v) < 1e-12;
  CHECK(has_zero);
}

TEST_CASE("monotonicity certification") {
  const Nonlinearity m = Nonlinearity::network(test::max_net(1));
  Matrix xs(1, 3);
  xs << 0.1, 0.5, 0.9;
  const MonotonicityReport r = check_monotone(m, xs, 3.0, 101);
  CHECK(r.certified);
  CHECK(r.min_slope == 0.0);

  const Nonlinearity bad = Nonlinearity::knot_table({0, 1, 2, 3}, {0, 1, 0.5, 2}, 0.0, 0.0);
  const MonotonicityReport rb = check_monotone(bad, Matrix(0, 1), 4.0, 101);
  CHECK_FALSE(rb.certified);
  CHECK(rb.min_slope == doctest::Approx(-0.5));
  CHECK(rb.witness_y >= 1.0);
  CHECK(rb.witness_y <= 2.0);

  Nonlinearity relu = Nonlinearity::relu();
  CHECK(relu.monotone_certified());
  // Certified nets are monotone on a sampled grid.
  Nonlinearity net = Nonlinearity::network(construct_interpolant_net(std::vector{-1.0, 0.0, 1.0},
                                                                     std::vector{-1.0, 0.0, 0.2}, {1.0, 2.0}, 1));
  CHECK(net.monotone_certified());
  const Section sec(net, x0);
  double prev = sec.value(-3.0);
  for (int i = 1; i <= 600; ++i) {
    const double v = sec.value(-3.0 + 0.01 * i);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("mollifier normalisation against an independent tanh-sinh oracle") {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double integral = ts.integrate([](double t) { return std::exp(-1.0 / (1.0 - t * t)); }, -1.0, 1.0);
  CHECK(Mollifier::unit_normalization() == doctest::Approx(1.0 / integral).epsilon(1e-12));

  for (double eps : {1e-4, 1e-2, 0.3}) {
    const Mollifier m(eps);
    double sum = 0.0;
    for (double w : m.weights()) sum += w;
    CHECK(std::abs(sum - 1.0) < 1e-10);
    const double direct = composite_gauss_legendre([&](double t) { return m.density(t); }, -eps, eps, 64,
                                                   gauss_legendre(8));
    CHECK(std::abs(direct - 1.0) < 1e-10);
    CHECK(m.density(0.3 * eps) == m.density(-0.3 * eps));
    CHECK(m.density(eps) == 0.0);
  }
  CHECK_THROWS_AS(Mollifier(0.0), ParameterError);
  CHECK_THROWS_AS(Mollifier(-1.0), ParameterError);
}

TEST_CASE("mollified evaluation of max") {
  const Nonlinearity m = Nonlinearity::relu();
  for (double eps : {0.1, 0.01}) {
    const Mollifier moll(eps);
    CHECK(mollified_eval(m, moll, none, 2 * eps) == doctest::Approx(2 * eps).epsilon(1e-13));
    CHECK(mollified_deriv_y(m, moll, none, 0.0) == doctest::Approx(0.5).epsilon(1e-13));

    boost::math::quadrature::tanh_sinh<double> ts;
    const double C = Mollifier::unit_normalization();
    const double oracle = eps * C * ts.integrate([](double t) { return t * std::exp(-1.0 / (1.0 - t * t)); }, 0.0, 1.0);
    CHECK(oracle == doctest::Approx(eps * kMollifiedMaxAtZero).epsilon(1e-12));
    // The quadrature does not resolve the kink; the error is at most a few ulps here since the
    // kink falls on a panel boundary.
    CHECK(mollified_eval(m, moll, none, 0.0) == doctest::Approx(oracle).epsilon(1e-10));
  }
  // Jensen: the convex max is dominated by its mollification.
  const Mollifier moll(0.2);
  for (int i = 0; i <= 80; ++i) {
    const double y = -1.0 + 0.025 * i;
    CHECK(mollified_eval(m, moll, none, y) >= eval(m, none, y) - 1e-14);
  }
  // Mollified monotone function stays monotone.
  const Nonlinearity dk = Nonlinearity::double_kink(0, 1, 0, 0.5, 2);
  for (int i = 0; i <= 300; ++i) CHECK(mollified_deriv_y(dk, moll, none, -1.0 + 0.01 * i) >= -1e-12);
}

TEST_CASE("mollified evaluation is exact on kink-free windows") {
  const Nonlinearity nl = Nonlinearity::network(random_net(11, {2, 6, 6, 1}));
  const Section s(nl, x0);
  const Mollifier moll(1e-3);
  int tested = 0;
  for (int i = 0; i < 40; ++i) {
    const double y = -2.0 + 0.1 * i + 0.013;
    if (!s.affine_on(y - 1e-3, y + 1e-3)) continue;
    ++tested;
    CHECK(s.mollified_value(moll, y) == doctest::Approx(s.value(y)).epsilon(1e-12));
    CHECK(s.mollified_deriv(moll, y) == doctest::Approx(s.weak_gradient(y)).epsilon(1e-12));
  }
  CHECK(tested > 20);
}

TEST_CASE("canonical smoothing") {
  CHECK(smoothed_relu(0.2, 0.0) == doctest::Approx(0.05));
  CHECK(smoothed_relu_deriv(0.2, 0.0) == doctest::Approx(0.5));
  CHECK(smoothed_relu(0.2, -0.3) == 0.0);
  CHECK(smoothed_relu(0.2, 0.3) == 0.3);

  const ReluNetwork mnet = test::max_net(1);
  CHECK(canonical_smooth_eval(mnet, 0.1, x0, 0.0) == doctest::Approx(0.025));
  CHECK(canonical_smooth_deriv(mnet, 0.1, x0, 0.0) == doctest::Approx(0.5));
  CHECK(canonical_smooth_eval(mnet, 0.1, x0, 0.15) == 0.15);
  CHECK(canonical_smooth_eval(mnet, 0.1, x0, -0.15) == 0.0);
  CHECK_THROWS_AS(canonical_smooth_eval(mnet, 0.0, x0, 0.0), ParameterError);

  // Deep net: sup error over sample points decays at rate O(eps).
  const ReluNetwork net = random_net(21, {2, 8, 8, 8, 1});
  const Nonlinearity nl = Nonlinearity::network(net);
  auto err = [&](double eps) {
    double e = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double y = -2.0 + 0.02 * i;
      e = std::max(e, std::abs(canonical_smooth_eval(net, eps, x0, y) - eval(nl, x0, y)));
    }
    return e;
  };
  double prev = err(0.08);
  for (double eps : {0.04, 0.02, 0.01}) {
    const double e = err(eps);
    CHECK(std::log2(prev / e) >= 0.9);
    prev = e;
  }
}

TEST_CASE("interpolant net construction") {
  const ReluNetwork mx = construct_interpolant_net(std::vector{0.0}, std::vector{0.0}, {0.0, 1.0}, 1);
  const Nonlinearity m = Nonlinearity::network(mx);
  CHECK(m.monotone_certified());
  for (double y : {-3.0, -0.1, 0.0, 0.4, 5.0}) CHECK(eval(m, x0, y) == std::max(0.0, y));

  // max(0,y) + 0.5 max(0,y-1) is in the class.
  auto f = [](double y) { return std::max(0.0, y) + 0.5 * std::max(0.0, y - 1.0); };
  const Nonlinearity g = Nonlinearity::network(construct_interpolant_net(std::vector{0.0, 1.0}, std::vector{0.0, 1.0}, {0.0, 1.5}, 1));
  const Section sg(g, x0);
  for (int i = 0; i <= 400; ++i) {
    const double y = -2.0 + 0.01 * i;
    CHECK(sg.value(y) == doctest::Approx(f(y)).epsilon(1e-14));
  }

  // 10^3 random points against the piecewise-linear interpolant.
  const std::vector<double> knots{-1.5, -0.2, 0.3, 0.35, 2.0}, values{-2.0, 0.1, 0.2, 0.9, 1.0};
  const Nonlinearity kt = Nonlinearity::knot_table(knots, values, 0.3, 0.7);
  const Nonlinearity ni = Nonlinearity::network(construct_interpolant_net(knots, values, {0.3, 0.7}, 2));
  CounterRng rng(5, 0);
  Vector x(2);
  x << 0.3, 0.8;
  for (int i = 0; i < 1000; ++i) {
    const double y = -4.0 + 8.0 * rng.next_uniform();
    CHECK(std::abs(eval(ni, x, y) - eval(kt, none, y)) <= 1e-12);
  }

  // Nodal interpolation of y^3/3: sup error <= L delta and decreasing with delta.
  double prev = 1e300;
  for (double delta : {0.4, 0.2, 0.1, 0.05}) {
    std::vector<double> k, v;
    for (double t = -2.0; t <= 2.0 + 1e-12; t += delta) {
      k.push_back(t);
      v.push_back(t * t * t / 3.0);
    }
    const Nonlinearity nk = Nonlinearity::network(construct_interpolant_net(k, v, {4.0, 4.0}, 1));
    const Section s(nk, x0);
    double e = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double y = -2.0 + 0.001 * i;
      e = std::max(e, std::abs(s.value(y) - y * y * y / 3.0));
    }
    CHECK(e <= 4.0 * delta);  // L = sup |f''| = 4 on [-2, 2]
    CHECK(e < prev);
    prev = e;
  }

  CHECK_THROWS_AS(construct_interpolant_net(std::vector{0.0, 0.0}, std::vector{0.0, 1.0}, {0, 0}, 1), ParameterError);
  const Nonlinearity dec = Nonlinearity::network(construct_interpolant_net(std::vector{0.0, 1.0}, std::vector{0.0, -1.0}, {0, 0}, 1));
  CHECK_FALSE(dec.monotone_certified());
}

TEST_CASE("to_network reproduces builtins") {
  for (const Nonlinearity& nl : {Nonlinearity::zero(), Nonlinearity::identity(), Nonlinearity::relu(),
                                 Nonlinearity::shifted_relu(0.4), Nonlinearity::double_kink(-1, 0.5, 0.1, 1, 2.5)}) {
    const Nonlinearity net = Nonlinearity::network(to_network(nl, 2));
    Vector x(2);
    x << 0.2, 0.7;
    for (int i = 0; i <= 100; ++i) {
      const double y = -3.0 + 0.06 * i;
      CHECK(eval(net, x, y) == doctest::Approx(eval(nl, none, y)).epsilon(1e-14));
    }
  }
}

TEST_CASE("network JSON round trip and errors") {
  const ReluNetwork net = random_net(4, {3, 5, 4, 1});
  const std::string text = network_to_json(net);
  const ReluNetwork back = network_from_json(text);
  CHECK(back == net);
  CHECK(network_to_json(back) == text);

  const std::string missing_bias = R"({"input_dim": 2, "layers": [{"weights": [[1, 2]]}]})";
  CHECK_THROWS_WITH_AS(network_from_json(missing_bias), doctest::Contains("bias"), ParseError);

  const std::string bad_dims =
      R"({"input_dim": 2, "layers": [{"weights": [[1, 2], [3, 4]], "bias": [0, 0]}, {"weights": [[1, 2, 3]], "bias": [0]}]})";
  CHECK_THROWS_WITH_AS(network_from_json(bad_dims), doctest::Contains("layers[1]"), ParseError);

  CHECK_THROWS_AS(network_from_json("{\"input_dim\": 2,\n \"layers\": [ oops ]}"), ParseError);
}

TEST_CASE("training") {
  SUBCASE("max function, arch [d+1, 8, 1]") {
    TrainingData data;
    const int n = 200;
    data.inputs.resize(2, n);
    data.targets.resize(n);
    CounterRng rng(3, 0);
    for (int j = 0; j < n; ++j) {
      data.inputs(0, j) = rng.next_uniform();
      data.inputs(1, j) = -2.0 + 4.0 * j / (n - 1);
      data.targets(j) = std::max(0.0, data.inputs(1, j));
    }
    TrainingConfig cfg;
    cfg.layer_sizes = {2, 8, 1};
    cfg.seed = 1;
    const TrainingResult r = train_net(data, cfg);
    CHECK(std::sqrt(r.best_loss) <= 1e-2);
    CHECK(mean_squared_loss(r.net, data) == doctest::Approx(r.best_loss));

    const TrainingResult again = train_net(data, cfg);
    CHECK(again.net == r.net);
  }
  SUBCASE("constant target") {
    TrainingData data;
    data.inputs = Matrix::Random(2, 50);
    data.targets = Vector::Constant(50, 0.7);
    TrainingConfig cfg;
    cfg.layer_sizes = {2, 4, 1};
    const TrainingResult r = train_net(data, cfg);
    cfg.iterations /= 4;
    const TrainingResult shorter = train_net(data, cfg);
    // Plain gradient descent: the loss keeps shrinking towards zero, slowly.
    CHECK(r.best_loss < 1e-4);
    CHECK(r.best_loss < shorter.best_loss);
  }
  TrainingConfig cfg;
  cfg.layer_sizes = {2, 4, 1};
  CHECK_THROWS_AS(train_net(TrainingData{}, cfg), ParameterError);
}
