#include "lipc/grid.hpp"

#include "lipc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lipc {

Grid::Grid(int dim, std::array<double, 2> lower, std::array<double, 2> upper, std::array<int, 2> nodes)
    : dim_(dim), lower_(lower), upper_(upper), nodes_(nodes), spacing_{0.0, 0.0}, size_(1), cell_measure_(1.0) {
  if (dim != 1 && dim != 2) throw ParameterError("Grid: dimension must be 1 or 2");
  if (dim == 1) {
    lower_[1] = 0.0;
    upper_[1] = 0.0;
    nodes_[1] = 1;
  }
  for (int axis = 0; axis < dim; ++axis) {
    if (nodes_[axis] < 1) throw ParameterError("Grid: axis " + std::to_string(axis) + " needs at least one node");
    if (!(upper_[axis] > lower_[axis]))
      throw ParameterError("Grid: axis " + std::to_string(axis) + " needs upper > lower");
    spacing_[axis] = (upper_[axis] - lower_[axis]) / (nodes_[axis] + 1);
    size_ *= nodes_[axis];
    cell_measure_ *= spacing_[axis];
  }
}

double Grid::domain_measure() const {
  double m = 1.0;
  for (int axis = 0; axis < dim_; ++axis) m *= upper_[axis] - lower_[axis];
  return m;
}

double Grid::coord(Eigen::Index k, int axis) const {
  const auto idx = multi_index(k);
  return lower_[axis] + (idx[axis] + 1) * spacing_[axis];
}

Vector Grid::point(Eigen::Index k) const {
  Vector p(dim_);
  for (int axis = 0; axis < dim_; ++axis) p(axis) = coord(k, axis);
  return p;
}

Matrix Grid::points() const {
  Matrix p(dim_, size_);
  for (Eigen::Index k = 0; k < size_; ++k) p.col(k) = point(k);
  return p;
}

std::string Grid::describe() const {
  std::ostringstream out;
  out << dim_ << "-D ";
  for (int axis = 0; axis < dim_; ++axis) {
    if (axis) out << " x ";
    out << "(" << lower_[axis] << "," << upper_[axis] << ")";
  }
  out << " interior nodes ";
  for (int axis = 0; axis < dim_; ++axis) {
    if (axis) out << "x";
    out << nodes_[axis];
  }
  return out.str();
}

void Grid::require(Eigen::Index length, const char* what) const {
  if (length != size_) throw DimensionError(std::string("grid mismatch for ") + what, size_, length);
}

GridFunction apply_laplacian(const Grid& grid, const Eigen::Ref<const Vector>& v) {
  grid.require(v.size(), "apply_laplacian");
  const int n0 = grid.nodes(0);
  const int n1 = grid.nodes(1);
  const double i0 = 1.0 / (grid.spacing(0) * grid.spacing(0));
  GridFunction out(v.size());
  if (grid.dim() == 1) {
    for (int i = 0; i < n0; ++i) {
      const double left = i > 0 ? v(i - 1) : 0.0;
      const double right = i + 1 < n0 ? v(i + 1) : 0.0;
      out(i) = i0 * (2.0 * v(i) - left - right);
    }
    return out;
  }
  const double i1 = 1.0 / (grid.spacing(1) * grid.spacing(1));
  for (int j = 0; j < n1; ++j) {
    for (int i = 0; i < n0; ++i) {
      const Eigen::Index k = grid.index(i, j);
      const double c = v(k);
      const double w = i > 0 ? v(k - 1) : 0.0;
      const double e = i + 1 < n0 ? v(k + 1) : 0.0;
      const double s = j > 0 ? v(k - n0) : 0.0;
      const double n = j + 1 < n1 ? v(k + n0) : 0.0;
      out(k) = i0 * (2.0 * c - w - e) + i1 * (2.0 * c - s - n);
    }
  }
  return out;
}

Eigen::SparseMatrix<double> laplacian_matrix(const Grid& grid) {
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> entries;
  const int n0 = grid.nodes(0);
  const int n1 = grid.nodes(1);
  const double i0 = 1.0 / (grid.spacing(0) * grid.spacing(0));
  const double i1 = grid.dim() == 2 ? 1.0 / (grid.spacing(1) * grid.spacing(1)) : 0.0;
  for (int j = 0; j < n1; ++j) {
    for (int i = 0; i < n0; ++i) {
      const Eigen::Index k = grid.index(i, j);
      entries.emplace_back(k, k, 2.0 * i0 + 2.0 * i1);
      if (i > 0) entries.emplace_back(k, k - 1, -i0);
      if (i + 1 < n0) entries.emplace_back(k, k + 1, -i0);
      if (grid.dim() == 2) {
        if (j > 0) entries.emplace_back(k, k - n0, -i1);
        if (j + 1 < n1) entries.emplace_back(k, k + n0, -i1);
      }
    }
  }
  Eigen::SparseMatrix<double> a(grid.size(), grid.size());
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

GridFunction solve_shifted_laplacian(const Grid& grid, const Eigen::Ref<const Vector>& c,
                                     const Eigen::Ref<const Vector>& r, double tol, int max_iter, CgStats* stats,
                                     const Vector* initial_guess) {
  grid.require(c.size(), "solve_shifted_laplacian coefficient");
  grid.require(r.size(), "solve_shifted_laplacian right-hand side");
  if ((c.array() < 0.0).any()) {
    Eigen::Index at = 0;
    c.minCoeff(&at);
    throw ParameterError("solve_shifted_laplacian: coefficient c is negative at node " + std::to_string(at));
  }
  if (!(tol > 0.0) || max_iter < 1) throw ParameterError("solve_shifted_laplacian: bad tolerance or iteration cap");

  const double r_norm = r.norm();
  GridFunction z = GridFunction::Zero(r.size());
  if (initial_guess && initial_guess->size() == r.size()) z = *initial_guess;
  if (r_norm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return GridFunction::Zero(r.size());
  }

  double diag_base = 2.0 / (grid.spacing(0) * grid.spacing(0));
  if (grid.dim() == 2) diag_base += 2.0 / (grid.spacing(1) * grid.spacing(1));
  const Vector inv_diag = (c.array() + diag_base).inverse().matrix();

  auto apply = [&](const Vector& v) -> Vector {
    Vector out = apply_laplacian(grid, v);
    out.array() += c.array() * v.array();
    return out;
  };

  Vector residual = r - apply(z);
  double res_norm = residual.norm();
  const double target = tol * r_norm;
  Vector precond = inv_diag.cwiseProduct(residual);
  Vector direction = precond;
  double rho = residual.dot(precond);
  int it = 0;
  std::vector<double> trace;
  while (res_norm > target && it < max_iter) {
    const Vector ad = apply(direction);
    const double alpha = rho / direction.dot(ad);
    z += alpha * direction;
    residual -= alpha * ad;
    ++it;
    // Replace the recursive residual periodically to avoid drift below the tolerance.
    if (it % 200 == 0) residual = r - apply(z);
    res_norm = residual.norm();
    precond = inv_diag.cwiseProduct(residual);
    const double rho_next = residual.dot(precond);
    direction = precond + (rho_next / rho) * direction;
    rho = rho_next;
  }
  res_norm = (r - apply(z)).norm();
  if (stats) *stats = {it, res_norm / r_norm};
  if (res_norm > target) {
    // One more pass from the current iterate covers residual drift before giving up.
    if (it < max_iter) {
      CgStats inner;
      const Vector restart = z;
      auto refined = solve_shifted_laplacian(grid, c, r, tol, max_iter - it, &inner, &restart);
      if (stats) *stats = {it + inner.iterations, inner.relative_residual};
      return refined;
    }
    throw ConvergenceError("conjugate gradients did not converge in " + std::to_string(max_iter) + " iterations",
                           res_norm / r_norm);
  }
  return z;
}

double inner_l2(const Grid& grid, const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  grid.require(a.size(), "inner_l2");
  grid.require(b.size(), "inner_l2");
  return grid.cell_measure() * a.dot(b);
}

double norm_l2(const Grid& grid, const Eigen::Ref<const Vector>& v) { return std::sqrt(inner_l2(grid, v, v)); }

double norm_linf(const Eigen::Ref<const Vector>& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double seminorm_h1(const Grid& grid, const Eigen::Ref<const Vector>& v) {
  grid.require(v.size(), "seminorm_h1");
  const int n0 = grid.nodes(0);
  const int n1 = grid.nodes(1);
  double total = 0.0;
  const double h0 = grid.spacing(0);
  for (int j = 0; j < n1; ++j)
    for (int i = 0; i <= n0; ++i) {
      const double left = i > 0 ? v(grid.index(i - 1, j)) : 0.0;
      const double right = i < n0 ? v(grid.index(i, j)) : 0.0;
      total += (right - left) * (right - left) / (h0 * h0);
    }
  if (grid.dim() == 2) {
    const double h1 = grid.spacing(1);
    for (int i = 0; i < n0; ++i)
      for (int j = 0; j <= n1; ++j) {
        const double below = j > 0 ? v(grid.index(i, j - 1)) : 0.0;
        const double above = j < n1 ? v(grid.index(i, j)) : 0.0;
        total += (above - below) * (above - below) / (h1 * h1);
      }
  }
  return std::sqrt(grid.cell_measure() * total);
}

double norm_h1(const Grid& grid, const Eigen::Ref<const Vector>& v) {
  const double l2 = norm_l2(grid, v);
  const double semi = seminorm_h1(grid, v);
  return std::sqrt(l2 * l2 + semi * semi);
}

double norm_Y(const Grid& grid, const Eigen::Ref<const Vector>& v) {
  const double lap = norm_l2(grid, apply_laplacian(grid, v));
  const double h1 = norm_h1(grid, v);
  return std::sqrt(lap * lap + h1 * h1);
}

double holder_seminorm(const Grid& grid, const Eigen::Ref<const Vector>& v, double exponent, std::size_t pair_budget,
                       std::uint64_t seed) {
  grid.require(v.size(), "holder_seminorm");
  if (!(exponent > 0.0 && exponent <= 1.0)) throw ParameterError("holder_seminorm: exponent must lie in (0, 1]");
  const Matrix pts = grid.points();
  const Eigen::Index m = grid.size();
  double best = 0.0;
  auto consider = [&](Eigen::Index a, Eigen::Index b) {
    if (a == b) return;
    const double dist = (pts.col(a) - pts.col(b)).norm();
    best = std::max(best, std::abs(v(a) - v(b)) / std::pow(dist, exponent));
  };
  if (m <= 4096) {
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = a + 1; b < m; ++b) consider(a, b);
    return best;
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto idx = grid.multi_index(k);
    if (idx[0] + 1 < grid.nodes(0)) consider(k, k + 1);
    if (grid.dim() == 2 && idx[1] + 1 < grid.nodes(1)) consider(k, k + grid.nodes(0));
  }
  CounterRng rng(seed, 0x686f6c64ULL);
  for (std::size_t p = 0; p < pair_budget; ++p) {
    const auto a = static_cast<Eigen::Index>(rng.next_index(static_cast<std::uint64_t>(m)));
    const auto b = static_cast<Eigen::Index>(rng.next_index(static_cast<std::uint64_t>(m)));
    consider(a, b);
  }
  return best;
}

double poincare_estimate(const Grid& grid) {
  const Vector zero = Vector::Zero(grid.size());
  Vector v = Vector::Ones(grid.size());
  v /= v.norm();
  for (int it = 0; it < 20; ++it) {
    v = solve_shifted_laplacian(grid, zero, v, 1e-12);
    v /= v.norm();
  }
  const double lambda = v.dot(apply_laplacian(grid, v));
  return 1.0 / std::sqrt(lambda);
}

}  // namespace lipc
