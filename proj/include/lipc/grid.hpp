#pragma once

#include "lipc/common.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <cstdint>
#include <string>

namespace lipc {

// Uniform tensor grid of interior nodes on (a_1, b_1) [x (a_2, b_2)] with homogeneous Dirichlet
// data implied on the boundary. Node k = i_1 + n_1 * i_2 (first axis fastest).
class Grid {
 public:
  Grid(int dim, std::array<double, 2> lower, std::array<double, 2> upper, std::array<int, 2> nodes);

  static Grid interval(double a, double b, int n) { return Grid(1, {a, 0.0}, {b, 0.0}, {n, 1}); }
  static Grid rectangle(double a1, double b1, double a2, double b2, int n1, int n2) {
    return Grid(2, {a1, a2}, {b1, b2}, {n1, n2});
  }
  static Grid unit_square(int n) { return rectangle(0.0, 1.0, 0.0, 1.0, n, n); }

  int dim() const { return dim_; }
  Eigen::Index size() const { return size_; }
  int nodes(int axis) const { return nodes_[axis]; }
  double lower(int axis) const { return lower_[axis]; }
  double upper(int axis) const { return upper_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double cell_measure() const { return cell_measure_; }
  double domain_measure() const;

  Eigen::Index index(int i0, int i1 = 0) const { return i0 + static_cast<Eigen::Index>(nodes_[0]) * i1; }
  std::array<int, 2> multi_index(Eigen::Index k) const {
    return {static_cast<int>(k % nodes_[0]), static_cast<int>(k / nodes_[0])};
  }
  double coord(Eigen::Index k, int axis) const;
  Vector point(Eigen::Index k) const;
  Matrix points() const;  // dim x size

  std::string describe() const;

  // Throws DimensionError unless v has one value per interior node.
  void require(Eigen::Index length, const char* what) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.lower_ == b.lower_ && a.upper_ == b.upper_ && a.nodes_ == b.nodes_;
  }

 private:
  int dim_;
  std::array<double, 2> lower_;
  std::array<double, 2> upper_;
  std::array<int, 2> nodes_;
  std::array<double, 2> spacing_;
  Eigen::Index size_;
  double cell_measure_;
};

// Samples fn(point) at every interior node.
template <typename F>
GridFunction sample(const Grid& grid, F&& fn) {
  GridFunction out(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) out(k) = fn(grid.point(k));
  return out;
}

// -Delta_h v with zero Dirichlet ghost values (3-point / 5-point stencil).
GridFunction apply_laplacian(const Grid& grid, const Eigen::Ref<const Vector>& v);

// Assembled -Delta_h (for direct solves and small-grid oracles).
Eigen::SparseMatrix<double> laplacian_matrix(const Grid& grid);

struct CgStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

// Solves (-Delta_h + diag(c)) z = r by Jacobi-preconditioned conjugate gradients with
// ||A z - r||_2 <= tol ||r||_2. Requires c >= 0.
GridFunction solve_shifted_laplacian(const Grid& grid, const Eigen::Ref<const Vector>& c,
                                     const Eigen::Ref<const Vector>& r, double tol = 1e-12, int max_iter = 20000,
                                     CgStats* stats = nullptr, const Vector* initial_guess = nullptr);

// Discrete L2 inner product w * sum(a_i b_i), w the cell measure.
double inner_l2(const Grid& grid, const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);
double norm_l2(const Grid& grid, const Eigen::Ref<const Vector>& v);
double norm_linf(const Eigen::Ref<const Vector>& v);
// sqrt(sum over axes of w * sum of squared forward difference quotients, boundary edges included).
double seminorm_h1(const Grid& grid, const Eigen::Ref<const Vector>& v);
double norm_h1(const Grid& grid, const Eigen::Ref<const Vector>& v);
// sqrt(||-Delta_h v||^2 + |v|_{H1}^2 + ||v||^2), graph norm of the Laplacian.
double norm_Y(const Grid& grid, const Eigen::Ref<const Vector>& v);

// max |v(x) - v(x')| / |x - x'|^a over node pairs: all pairs when size <= 4096, otherwise all
// axis neighbours plus `pair_budget` random pairs drawn from CounterRng(seed).
double holder_seminorm(const Grid& grid, const Eigen::Ref<const Vector>& v, double exponent,
                       std::size_t pair_budget = 200000, std::uint64_t seed = 0);

// 1 / sqrt(lambda_min(-Delta_h)) from 20 inverse power iterations: c with ||v|| <= c ||grad v||.
double poincare_estimate(const Grid& grid);

}  // namespace lipc
