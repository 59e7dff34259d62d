#pragma once

#include "lipc/common.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace lipc {

struct DenseLayer {
  Matrix weights;  // n_l x n_{l-1}
  Vector bias;     // n_l
};

// Fully connected ReLU network R^{d+1} -> R. The scalar state y is the LAST input
// coordinate; the first d inputs are spatial coordinates. ReLU acts between layers,
// never on the output.
class ReluNetwork {
 public:
  ReluNetwork() = default;
  explicit ReluNetwork(std::vector<DenseLayer> layers);

  int input_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weights.cols()); }
  int spatial_dim() const { return input_dim() - 1; }
  std::size_t depth() const { return layers_.size(); }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Set only by check_monotone/certify or by constructions that are monotone by design.
  bool monotone_certified() const { return monotone_certified_; }
  void set_monotone_certified(bool value) { monotone_certified_ = value; }

  friend bool operator==(const ReluNetwork& a, const ReluNetwork& b);

 private:
  std::vector<DenseLayer> layers_;
  bool monotone_certified_ = false;
};

enum class BuiltinKind { zero, identity, relu, shifted_relu, double_kink };

// Analytic PC1 functions of y alone.
//   shifted_relu: max(0, y - t0)
//   double_kink:  slope s0 on (-inf, t0], s1 on [t0, t1], s2 on [t1, inf), value 0 at t0
struct Builtin {
  BuiltinKind kind = BuiltinKind::zero;
  double t0 = 0.0;
  double t1 = 0.0;
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
};

// Continuous piecewise-linear interpolant of (knots, values), extended by the end slopes.
struct KnotTable {
  std::vector<double> knots;
  std::vector<double> values;
  double left_slope = 0.0;
  double right_slope = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
  double distance(double v) const { return v < lo ? lo - v : (v > hi ? v - hi : 0.0); }
};

class Nonlinearity {
 public:
  using Repr = std::variant<ReluNetwork, Builtin, KnotTable>;

  Nonlinearity() : Nonlinearity(zero()) {}

  static Nonlinearity zero();
  static Nonlinearity identity();
  static Nonlinearity relu();
  static Nonlinearity shifted_relu(double t0);
  static Nonlinearity double_kink(double t0, double t1, double s0, double s1, double s2);
  static Nonlinearity knot_table(std::vector<double> knots, std::vector<double> values, double left_slope,
                                 double right_slope);
  static Nonlinearity network(ReluNetwork net);

  const Repr& repr() const { return repr_; }
  bool is_network() const { return std::holds_alternative<ReluNetwork>(repr_); }
  const ReluNetwork* as_network() const { return std::get_if<ReluNetwork>(&repr_); }

  // Spatial dimension the nonlinearity requires, or nullopt if it ignores x.
  std::optional<int> spatial_dim() const;

  bool monotone_certified() const { return monotone_certified_; }
  void set_monotone_certified(bool value);

  // All kinks of y -> f(x, y) for 1-D variants (sorted); empty for networks.
  std::vector<double> explicit_kinks() const;

  // True when y -> f(x, y) is differentiable everywhere (zero, identity).
  bool is_smooth() const;

 private:
  explicit Nonlinearity(Repr repr, bool certified) : repr_(std::move(repr)), monotone_certified_(certified) {}

  Repr repr_;
  bool monotone_certified_ = false;
};

// Standard mollifier rho_eps(t) = (C/eps) exp(-1/(1-(t/eps)^2)) on |t| < eps, together with the
// composite Gauss-Legendre rule used to convolve with it. Immutable after construction.
class Mollifier {
 public:
  explicit Mollifier(double epsilon, int panels = 64, int nodes_per_panel = 8);

  double epsilon() const { return epsilon_; }
  int panels() const { return panels_; }
  int nodes_per_panel() const { return nodes_per_panel_; }
  int quad_nodes() const { return panels_ * nodes_per_panel_; }
  double normalization() const { return normalization_; }

  double density(double t) const;

  // Quadrature offsets s_j in (-eps, eps) and weights w_j ~ rho_eps(s_j) ds so that
  // (rho_eps * g)(y) ~ sum_j w_j g(y - s_j). Weights sum to one up to rounding.
  std::span<const double> offsets() const { return offsets_; }
  std::span<const double> weights() const { return weights_; }

  // 1 / int_{-1}^{1} exp(-1/(1-t^2)) dt, computed once by adaptive quadrature to 1e-12.
  static double unit_normalization();

 private:
  double epsilon_;
  int panels_;
  int nodes_per_panel_;
  double normalization_;
  std::vector<double> offsets_;
  std::vector<double> weights_;
};

// The scalar map y -> f(x, y) at a fixed spatial point x. For networks the spatial part of the
// first layer is folded into an offset once, so repeated evaluation only touches y.
// Holds scratch buffers: use one Section per thread. The Nonlinearity must outlive the Section.
class Section {
 public:
  Section(const Nonlinearity& nl, const Eigen::Ref<const Vector>& x);

  double value(double y) const;
  double dir_deriv(double y, double h) const;
  std::pair<double, double> one_sided(double y) const;  // (f'_-, f'_+)
  Interval clarke(double y) const;
  // Union of Clarke intervals over [y - radius, y + radius].
  Interval clarke_window(double y, double radius) const;
  double weak_gradient(double y) const;  // sigma'(0) = 0 convention

  // Exact test: true iff f(x, .) has no kink in the open interval (lo, hi).
  bool affine_on(double lo, double hi) const;

  // Kinks in [lo, hi]: explicit for 1-D variants; for networks, a uniform split into `samples`
  // cells refined by bisection on preactivation sign changes down to `resolution`.
  std::vector<double> kinks(double lo, double hi, int samples = 64, double resolution = 1e-13) const;

  double mollified_value(const Mollifier& moll, double y) const;
  double mollified_deriv(const Mollifier& moll, double y) const;

  // Networks only: activation replaced by the C1 quadratic blend sigma_eps.
  double canonical_value(double eps, double y) const;
  double canonical_deriv(double eps, double y) const;

 private:
  enum class Mode { exact_dir, weak_grad, canonical };
  double network_value(double y) const;
  double network_tangent(double y, double h, Mode mode, double eps) const;
  double network_canonical_value(double eps, double y) const;
  double builtin_value(const Builtin& b, double y) const;
  std::pair<double, double> builtin_slopes(const Builtin& b, double y) const;
  double knot_value(const KnotTable& t, double y) const;
  std::pair<double, double> knot_slopes(const KnotTable& t, double y) const;
  void collect_network_kinks(double lo, double hi, double resolution, std::vector<double>& out) const;

  const Nonlinearity* nl_;
  const ReluNetwork* net_ = nullptr;
  Vector first_offset_;
  Vector first_slope_;
  mutable std::vector<Vector> pre_;
  mutable std::vector<Vector> tangent_;
  mutable std::vector<Vector> pre_hi_;
  mutable Vector work_;
};

// Point evaluations. x must have the network's spatial dimension; 1-D variants ignore x.
double eval(const Nonlinearity& nl, const Eigen::Ref<const Vector>& x, double y);
double dir_deriv(const Nonlinearity& nl, const Eigen::Ref<const Vector>& x, double y, double h);
std::pair<double, double> one_sided_derivs(const Nonlinearity& nl, const Eigen::Ref<const Vector>& x, double y);
Interval clarke_interval(const Nonlinearity& nl, const Eigen::Ref<const Vector>& x, double y);
double weak_gradient_y(const Nonlinearity& nl, const Eigen::Ref<const Vector>& x, double y);
double mollified_eval(const Nonlinearity& nl, const Mollifier& moll, const Eigen::Ref<const Vector>& x, double y);
double mollified_deriv_y(const Nonlinearity& nl, const Mollifier& moll, const Eigen::Ref<const Vector>& x,
                         double y);
double canonical_smooth_eval(const ReluNetwork& net, double eps, const Eigen::Ref<const Vector>& x, double y);
double canonical_smooth_deriv(const ReluNetwork& net, double eps, const Eigen::Ref<const Vector>& x, double y);

// sigma_eps(t) = 0 (t <= -eps), (t + eps)^2 / (4 eps) (|t| <= eps), t (t >= eps).
double smoothed_relu(double eps, double t);
double smoothed_relu_deriv(double eps, double t);

struct MonotonicityReport {
  double min_slope = 0.0;
  Vector witness_x;
  double witness_y = 0.0;
  bool certified = false;
  double tolerance = 1e-12;
  double window = 0.0;          // samples cover [-window, window]
  int y_samples = 0;
  std::size_t x_samples = 0;
  std::size_t points_checked = 0;  // uniform samples plus refined kink locations
};

// x_samples: one spatial point per column (may have zero rows for 1-D variants).
MonotonicityReport check_monotone(const Nonlinearity& nl, const Matrix& x_samples, double window, int y_samples,
                                  double tol = 1e-12);

// Runs check_monotone and records the outcome on nl (and on the wrapped network).
MonotonicityReport certify(Nonlinearity& nl, const Matrix& x_samples, double window, int y_samples,
                           double tol = 1e-12);

// One-hidden-layer net c0 + s_left*y + sum_i a_i max(0, y - t_i) reproducing the piecewise-linear
// interpolant exactly; spatial weights are zero. Monotone-certified iff every induced slope is >= 0.
ReluNetwork construct_interpolant_net(std::span<const double> knots, std::span<const double> values,
                                      std::pair<double, double> end_slopes, int spatial_dim);

// Exact ReLU-network realisation of a builtin or knot table (identity for networks).
ReluNetwork to_network(const Nonlinearity& nl, int spatial_dim);

}  // namespace lipc
