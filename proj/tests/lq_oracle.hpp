#pragma once

// Dense linear-quadratic oracle for nl = zero:
//   J(u) = 1/2 ||B u - g||^2 + alpha/2 ||u||^2,  B = (-Delta_h)^{-1},
// with the discrete L2 inner product (the cell measure cancels from the gradient).

#include "helpers.hpp"

#include <Eigen/Dense>

namespace lipc::test {

struct LqOracle {
  Grid grid;
  Matrix B;
  Vector g;
  double alpha;

  LqOracle(const Grid& grid_, const Vector& g_, double alpha_)
      : grid(grid_), B(dense_laplacian(grid_).inverse()), g(g_), alpha(alpha_) {}

  double objective(const Vector& u) const {
    const double w = grid.cell_measure();
    return 0.5 * w * (B * u - g).squaredNorm() + 0.5 * alpha * w * u.squaredNorm();
  }
  Vector adjoint(const Vector& u) const { return B * (B * u - g); }
  Vector gradient(const Vector& u) const { return adjoint(u) + alpha * u; }
  Matrix hessian() const { return B * B + alpha * Matrix::Identity(B.rows(), B.cols()); }
  Vector unconstrained() const { return hessian().ldlt().solve(B * g); }

  // Primal-dual active set method on the dense box QP.
  Vector constrained(const Vector& ua, const Vector& ub) const {
    const Matrix H = hessian();
    const Vector c = B * g;
    const Eigen::Index m = c.size();
    Vector u = unconstrained().cwiseMax(ua).cwiseMin(ub);
    Vector lambda = Vector::Zero(m);
    Eigen::VectorXi state = Eigen::VectorXi::Constant(m, 2);
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXi next(m);
      for (Eigen::Index i = 0; i < m; ++i)
        next(i) = lambda(i) + alpha * (u(i) - ub(i)) > 0 ? 1 : (lambda(i) + alpha * (u(i) - ua(i)) < 0 ? -1 : 0);
      if (next == state) break;
      state = next;
      std::vector<Eigen::Index> inactive;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (state(i) == 1) u(i) = ub(i);
        if (state(i) == -1) u(i) = ua(i);
        if (state(i) == 0) inactive.push_back(i);
      }
      const auto n = static_cast<Eigen::Index>(inactive.size());
      Matrix Hii(n, n);
      Vector rhs(n);
      for (Eigen::Index a = 0; a < n; ++a) {
        rhs(a) = c(inactive[a]);
        for (Eigen::Index j = 0; j < m; ++j)
          if (state(j) != 0) rhs(a) -= H(inactive[a], j) * u(j);
        for (Eigen::Index b = 0; b < n; ++b) Hii(a, b) = H(inactive[a], inactive[b]);
      }
      const Vector ui = Hii.ldlt().solve(rhs);
      for (Eigen::Index a = 0; a < n; ++a) u(inactive[a]) = ui(a);
      lambda = c - H * u;
      for (Eigen::Index a = 0; a < n; ++a) lambda(inactive[a]) = 0.0;
    }
    return u;
  }
};

}  // namespace lipc::test
