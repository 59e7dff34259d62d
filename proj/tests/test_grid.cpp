#include "helpers.hpp"

#include "lipc/grid_io.hpp"
#include "lipc/io_util.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>

using namespace lipc;

TEST_CASE("laplacian stencil") {
  const Grid g = Grid::interval(0, 1, 31);
  CHECK(norm_linf(apply_laplacian(g, Vector::Zero(g.size()))) == 0.0);
  const Vector q = sample(g, [](const Vector& x) { return x(0) * (1 - x(0)); });
  CHECK((apply_laplacian(g, q).array() - 2.0).abs().maxCoeff() < 1e-11);

  // matches the assembled matrix
  const Grid g2 = Grid::rectangle(0, 2, -1, 1, 7, 5);
  const Vector v = Vector::Random(g2.size());
  CHECK((apply_laplacian(g2, v) - laplacian_matrix(g2) * v).norm() < 1e-12);

  // O(h^2) eigenfunction residual, ratio ~4 under doubling
  auto err = [](int n) {
    const Grid s = Grid::unit_square(n);
    const Vector e = test::sin_mode(s);
    return norm_linf(apply_laplacian(s, e) - 2 * M_PI * M_PI * e);
  };
  const double e1 = err(15), e2 = err(31), e3 = err(63);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("laplacian symmetry and positivity") {
  const Grid g = Grid::rectangle(0, 1, 0, 2, 9, 13);
  CounterRng rng(1, 0);
  for (int k = 0; k < 20; ++k) {
    Vector a(g.size()), b(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      a(i) = rng.next_normal();
      b(i) = rng.next_normal();
    }
    const double ab = inner_l2(g, apply_laplacian(g, a), b);
    const double ba = inner_l2(g, a, apply_laplacian(g, b));
    CHECK(std::abs(ab - ba) <= 1e-10 * std::abs(ab) + 1e-14);
    CHECK(inner_l2(g, apply_laplacian(g, a), a) > 0.0);
  }
}

TEST_CASE("shifted laplacian CG") {
  const Grid g = Grid::interval(0, 1, 63);
  const Vector z = solve_shifted_laplacian(g, Vector::Zero(g.size()), Vector::Constant(g.size(), 2.0));
  const Vector exact = sample(g, [](const Vector& x) { return x(0) * (1 - x(0)); });
  CHECK(norm_linf(z - exact) < 1e-10);  // exact on quadratics

  const Grid s = Grid::unit_square(31);
  const Vector e = test::sin_mode(s);
  const Vector r = (2 * M_PI * M_PI + 1) * e;
  const Vector zs = solve_shifted_laplacian(s, Vector::Ones(s.size()), r);
  CHECK(norm_linf(zs - e) < 2e-3);

  // random SPD instance vs dense solve
  const Grid m = Grid::rectangle(0, 1, 0, 1, 20, 20);
  CounterRng rng(2, 0);
  Vector c(m.size()), rhs(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    c(i) = 5.0 * rng.next_uniform();
    rhs(i) = rng.next_normal();
  }
  CgStats st;
  const Vector zc = solve_shifted_laplacian(m, c, rhs, 1e-12, 20000, &st);
  Matrix A = test::dense_laplacian(m);
  A.diagonal() += c;
  CHECK((A * zc - rhs).norm() <= 1e-12 * rhs.norm() * 1.0001);
  CHECK((zc - A.ldlt().solve(rhs)).cwiseAbs().maxCoeff() < 1e-8);

  // maximum principle
  const Vector pos = rhs.cwiseAbs();
  CHECK(solve_shifted_laplacian(m, c, pos).minCoeff() >= -1e-12);

  Vector neg = c;
  neg(3) = -1.0;
  CHECK_THROWS_AS(solve_shifted_laplacian(m, neg, rhs), ParameterError);
  CHECK_THROWS_AS(solve_shifted_laplacian(m, c, rhs, 1e-14, 2), ConvergenceError);
  CHECK_THROWS_AS(apply_laplacian(m, Vector::Zero(3)), DimensionError);
}

TEST_CASE("norms") {
  const Grid g = Grid::unit_square(63);
  const Vector one = Vector::Ones(g.size());
  CHECK(norm_l2(g, one) == doctest::Approx(std::sqrt(g.cell_measure() * g.size())));
  CHECK(norm_l2(g, test::sin_mode(g)) == doctest::Approx(0.5).epsilon(1e-10));

  const Grid s = Grid::rectangle(0, 1, 0, 1, 12, 9);
  CounterRng rng(4, 0);
  for (int k = 0; k < 50; ++k) {
    Vector v(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) v(i) = rng.next_normal();
    CHECK(norm_Y(s, v) >= norm_h1(s, v));
    CHECK(norm_h1(s, v) >= norm_l2(s, v));
  }
}

TEST_CASE("holder seminorm") {
  const Grid g = Grid::interval(0, 1, 255);
  CHECK(holder_seminorm(g, Vector::Constant(g.size(), 3.0), 0.5) == 0.0);
  const Vector x = sample(g, [](const Vector& p) { return p(0); });
  CHECK(holder_seminorm(g, x, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  const Vector cusp = sample(g, [](const Vector& p) { return std::sqrt(std::abs(p(0) - 0.5)); });
  const double h = holder_seminorm(g, cusp, 0.5);
  CHECK(h <= 1.0 + 1e-12);
  CHECK(h >= 0.99);

  // sampled branch on a large grid is deterministic per seed
  const Grid big = Grid::unit_square(80);
  const Vector v = test::sin_mode(big);
  CHECK(holder_seminorm(big, v, 0.5, 5000, 3) == holder_seminorm(big, v, 0.5, 5000, 3));
}

TEST_CASE("poincare estimate") {
  CHECK(poincare_estimate(Grid::interval(0, 1, 255)) == doctest::Approx(1.0 / M_PI).epsilon(0.02));
  const double a = poincare_estimate(Grid::unit_square(31));
  const double b = poincare_estimate(Grid::unit_square(63));
  CHECK(b == doctest::Approx(1.0 / (M_PI * std::sqrt(2.0))).epsilon(0.02));
  CHECK(std::abs(a - b) / b < 0.01);
}

TEST_CASE("grid function CSV and JSON") {
  const Grid g = Grid::rectangle(0, 1, 0, 2, 4, 3);
  const Vector v = Vector::Random(g.size()) * 1e3;
  CsvMetadata meta;
  meta.add("seed", "4");
  const std::string csv = grid_function_to_csv(g, v, &meta);
  CHECK(csv.rfind("x1,x2,value\n", 0) == 0);
  CHECK(csv.find("# seed") != std::string::npos);
  CHECK(grid_function_from_csv(g, csv) == v);
  CHECK(grid_function_from_json(g, grid_function_to_json(g, v)) == v);

  const Grid other = Grid::rectangle(0, 1, 0, 2, 3, 4);
  CHECK_THROWS_AS(grid_function_from_csv(other, csv), Error);
  CHECK_THROWS_AS(grid_function_from_json(other, grid_function_to_json(g, v)), Error);
}

TEST_CASE("format_double round trips") {
  CounterRng rng(8, 0);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(rng.next_normal(), static_cast<int>(rng.next_index(200)) - 100);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("counter rng is a pure function of (seed, stream, index)") {
  const CounterRng a(42, 7), b(42, 7), c(43, 7);
  for (std::uint64_t i = 0; i < 100; ++i) {
    CHECK(a.bits_at(i) == b.bits_at(i));
    CHECK(a.bits_at(i) != c.bits_at(i));
    const double u = a.uniform_at(i);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  // SplitMix64 reference value for state 0 (first output of the standard generator).
  CHECK(CounterRng::splitmix(0) == 0xE220A8397B1DCDAFULL);
  double mean = 0, sq = 0;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const double z = a.normal_at(i);
    mean += z;
    sq += z * z;
  }
  CHECK(std::abs(mean / 20000) < 0.03);
  CHECK(std::abs(sq / 20000 - 1.0) < 0.05);
}
