#include "lipc/network.hpp"

#include "lipc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lipc {

// ---------------------------------------------------------------------------------------------
// ReluNetwork

ReluNetwork::ReluNetwork(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ParameterError("ReluNetwork: at least one layer required");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const std::string name = "ReluNetwork layer " + std::to_string(l);
    if (layer.bias.size() != layer.weights.rows())
      throw DimensionError(name + " bias length", layer.weights.rows(), layer.bias.size());
    if (l > 0 && layer.weights.cols() != layers_[l - 1].weights.rows())
      throw DimensionError(name + " weight columns", layers_[l - 1].weights.rows(), layer.weights.cols());
  }
  if (layers_.front().weights.cols() < 1) throw DimensionError("ReluNetwork input_dim", 1, 0);
  if (layers_.back().weights.rows() != 1)
    throw DimensionError("ReluNetwork output dimension (last layer rows)", 1, layers_.back().weights.rows());
}

bool operator==(const ReluNetwork& a, const ReluNetwork& b) {
  if (a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    const auto& la = a.layers_[l];
    const auto& lb = b.layers_[l];
    if (la.weights.rows() != lb.weights.rows() || la.weights.cols() != lb.weights.cols()) return false;
    if (la.weights != lb.weights || la.bias != lb.bias) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------------------------
// Nonlinearity

namespace {

std::vector<double> knot_slopes_list(const KnotTable& t) {
  std::vector<double> slopes;
  slopes.reserve(t.knots.size() + 1);
  slopes.push_back(t.left_slope);
  for (std::size_t i = 0; i + 1 < t.knots.size(); ++i)
    slopes.push_back((t.values[i + 1] - t.values[i]) / (t.knots[i + 1] - t.knots[i]));
  slopes.push_back(t.right_slope);
  return slopes;
}

bool all_nonnegative(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double s) { return s >= 0.0; });
}

}  // namespace

Nonlinearity Nonlinearity::zero() { return Nonlinearity(Builtin{BuiltinKind::zero}, true); }
Nonlinearity Nonlinearity::identity() { return Nonlinearity(Builtin{BuiltinKind::identity}, true); }
Nonlinearity Nonlinearity::relu() { return Nonlinearity(Builtin{BuiltinKind::relu}, true); }

Nonlinearity Nonlinearity::shifted_relu(double t0) {
  Builtin b{BuiltinKind::shifted_relu};
  b.t0 = t0;
  return Nonlinearity(b, true);
}

Nonlinearity Nonlinearity::double_kink(double t0, double t1, double s0, double s1, double s2) {
  if (!(t0 < t1)) throw ParameterError("double_kink: need t0 < t1");
  Builtin b{BuiltinKind::double_kink, t0, t1, s0, s1, s2};
  return Nonlinearity(b, s0 >= 0.0 && s1 >= 0.0 && s2 >= 0.0);
}

Nonlinearity Nonlinearity::knot_table(std::vector<double> knots, std::vector<double> values, double left_slope,
                                      double right_slope) {
  if (knots.empty()) throw ParameterError("knot_table: at least one knot required");
  if (knots.size() != values.size())
    throw DimensionError("knot_table values", static_cast<long>(knots.size()), static_cast<long>(values.size()));
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    if (!(knots[i] < knots[i + 1])) throw ParameterError("knot_table: knots must be strictly increasing");
  KnotTable t{std::move(knots), std::move(values), left_slope, right_slope};
  const bool monotone = all_nonnegative(knot_slopes_list(t));
  return Nonlinearity(std::move(t), monotone);
}

Nonlinearity Nonlinearity::network(ReluNetwork net) {
  const bool certified = net.monotone_certified();
  return Nonlinearity(std::move(net), certified);
}

std::optional<int> Nonlinearity::spatial_dim() const {
  if (const auto* net = as_network()) return net->spatial_dim();
  return std::nullopt;
}

void Nonlinearity::set_monotone_certified(bool value) {
  monotone_certified_ = value;
  if (auto* net = std::get_if<ReluNetwork>(&repr_)) net->set_monotone_certified(value);
}

std::vector<double> Nonlinearity::explicit_kinks() const {
  if (const auto* b = std::get_if<Builtin>(&repr_)) {
    switch (b->kind) {
      case BuiltinKind::zero:
      case BuiltinKind::identity:
        return {};
      case BuiltinKind::relu:
        return {0.0};
      case BuiltinKind::shifted_relu:
        return {b->t0};
      case BuiltinKind::double_kink: {
        std::vector<double> out;
        if (b->s0 != b->s1) out.push_back(b->t0);
        if (b->s1 != b->s2) out.push_back(b->t1);
        return out;
      }
    }
  }
  if (const auto* t = std::get_if<KnotTable>(&repr_)) {
    const auto slopes = knot_slopes_list(*t);
    std::vector<double> out;
    for (std::size_t i = 0; i < t->knots.size(); ++i)
      if (slopes[i] != slopes[i + 1]) out.push_back(t->knots[i]);
    return out;
  }
  return {};
}

bool Nonlinearity::is_smooth() const {
  if (const auto* b = std::get_if<Builtin>(&repr_))
    return b->kind == BuiltinKind::zero || b->kind == BuiltinKind::identity;
  if (std::holds_alternative<KnotTable>(repr_)) return explicit_kinks().empty();
  return false;
}

// ---------------------------------------------------------------------------------------------
// Mollifier

double Mollifier::unit_normalization() {
  static const double value = [] {
    auto bump = [](double t) {
      const double s = 1.0 - t * t;
      return s <= 0.0 ? 0.0 : std::exp(-1.0 / s);
    };
    constexpr int pieces = 16;
    double integral = 0.0;
    for (int k = 0; k < pieces; ++k) {
      const double a = -1.0 + 2.0 * k / pieces;
      const double b = -1.0 + 2.0 * (k + 1) / pieces;
      integral += adaptive_simpson(bump, a, b, 1e-14 / pieces);
    }
    return 1.0 / integral;
  }();
  return value;
}

Mollifier::Mollifier(double epsilon, int panels, int nodes_per_panel)
    : epsilon_(epsilon), panels_(panels), nodes_per_panel_(nodes_per_panel), normalization_(unit_normalization()) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("Mollifier: epsilon must be positive");
  if (panels < 2 || panels % 2 != 0) throw ParameterError("Mollifier: panel count must be even and >= 2");
  if (nodes_per_panel < 1) throw ParameterError("Mollifier: need at least one node per panel");

  const auto rule = gauss_legendre(nodes_per_panel);
  const int count = panels * nodes_per_panel;
  offsets_.resize(count);
  weights_.resize(count);
  const double width = 2.0 * epsilon / panels;
  const double half = 0.5 * width;
  for (int k = 0; k < panels / 2; ++k) {
    const double mid = -epsilon + (k + 0.5) * width;
    for (int i = 0; i < nodes_per_panel; ++i) {
      const int j = k * nodes_per_panel + i;
      const double s = mid + half * rule.nodes[i];
      offsets_[j] = s;
      weights_[j] = half * rule.weights[i] * density(s);
      offsets_[count - 1 - j] = -s;
      weights_[count - 1 - j] = weights_[j];
    }
  }
  double total = 0.0;
  for (int j = 0; j < count / 2; ++j) total += 2.0 * weights_[j];
  for (double& w : weights_) w /= total;
}

double Mollifier::density(double t) const {
  const double r = t / epsilon_;
  const double s = 1.0 - r * r;
  if (s <= 0.0) return 0.0;
  return normalization_ / epsilon_ * std::exp(-1.0 / s);
}

// ---------------------------------------------------------------------------------------------
// Activations

double smoothed_relu(double eps, double t) {
  if (t <= -eps) return 0.0;
  if (t >= eps) return t;
  return (t + eps) * (t + eps) / (4.0 * eps);
}

double smoothed_relu_deriv(double eps, double t) {
  if (t <= -eps) return 0.0;
  if (t >= eps) return 1.0;
  return (t + eps) / (2.0 * eps);
}

// ---------------------------------------------------------------------------------------------
// Section

Section::Section(const Nonlinearity& nl, const Eigen::Ref<const Vector>& x) : nl_(&nl) {
  net_ = nl.as_network();
  if (!net_) return;
  const int d = net_->spatial_dim();
  if (x.size() != d) throw DimensionError("network spatial input", d, x.size());
  const auto& first = net_->layers().front();
  first_offset_ = first.bias;
  if (d > 0) first_offset_.noalias() += first.weights.leftCols(d) * x;
  first_slope_ = first.weights.col(d);
  const auto& layers = net_->layers();
  pre_.resize(layers.size());
  tangent_.resize(layers.size());
  pre_hi_.resize(layers.size());
  Eigen::Index widest = 1;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    pre_[l].resize(layers[l].weights.rows());
    tangent_[l].resize(layers[l].weights.rows());
    pre_hi_[l].resize(layers[l].weights.rows());
    widest = std::max(widest, layers[l].weights.rows());
  }
  work_.resize(widest);
}

double Section::network_value(double y) const {
  const auto& layers = net_->layers();
  pre_[0] = first_offset_ + first_slope_ * y;
  for (std::size_t l = 1; l < layers.size(); ++l) {
    auto act = work_.head(pre_[l - 1].size());
    act = pre_[l - 1].cwiseMax(0.0);
    pre_[l].noalias() = layers[l].weights * act;
    pre_[l] += layers[l].bias;
  }
  return pre_.back()(0);
}

double Section::network_tangent(double y, double h, Mode mode, double eps) const {
  const auto& layers = net_->layers();
  pre_[0] = first_offset_ + first_slope_ * y;
  tangent_[0] = first_slope_ * h;
  for (std::size_t l = 1; l < layers.size(); ++l) {
    const Vector& a = pre_[l - 1];
    Vector& t = tangent_[l - 1];
    auto act = work_.head(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double ai = a(i);
      switch (mode) {
        case Mode::exact_dir:
          act(i) = std::max(ai, 0.0);
          t(i) = ai > 0.0 ? t(i) : (ai == 0.0 ? std::max(0.0, t(i)) : 0.0);
          break;
        case Mode::weak_grad:
          act(i) = std::max(ai, 0.0);
          t(i) = ai > 0.0 ? t(i) : 0.0;
          break;
        case Mode::canonical:
          act(i) = smoothed_relu(eps, ai);
          t(i) = smoothed_relu_deriv(eps, ai) * t(i);
          break;
      }
    }
    pre_[l].noalias() = layers[l].weights * act;
    pre_[l] += layers[l].bias;
    tangent_[l].noalias() = layers[l].weights * t;
  }
  return tangent_.back()(0);
}

double Section::network_canonical_value(double eps, double y) const {
  const auto& layers = net_->layers();
  pre_[0] = first_offset_ + first_slope_ * y;
  for (std::size_t l = 1; l < layers.size(); ++l) {
    auto act = work_.head(pre_[l - 1].size());
    for (Eigen::Index i = 0; i < act.size(); ++i) act(i) = smoothed_relu(eps, pre_[l - 1](i));
    pre_[l].noalias() = layers[l].weights * act;
    pre_[l] += layers[l].bias;
  }
  return pre_.back()(0);
}

double Section::builtin_value(const Builtin& b, double y) const {
  switch (b.kind) {
    case BuiltinKind::zero:
      return 0.0;
    case BuiltinKind::identity:
      return y;
    case BuiltinKind::relu:
      return std::max(0.0, y);
    case BuiltinKind::shifted_relu:
      return std::max(0.0, y - b.t0);
    case BuiltinKind::double_kink:
      return b.s0 * std::min(y - b.t0, 0.0) + b.s1 * (std::clamp(y, b.t0, b.t1) - b.t0) +
             b.s2 * std::max(y - b.t1, 0.0);
  }
  return 0.0;
}

std::pair<double, double> Section::builtin_slopes(const Builtin& b, double y) const {
  switch (b.kind) {
    case BuiltinKind::zero:
      return {0.0, 0.0};
    case BuiltinKind::identity:
      return {1.0, 1.0};
    case BuiltinKind::relu:
      return {y > 0.0 ? 1.0 : 0.0, y >= 0.0 ? 1.0 : 0.0};
    case BuiltinKind::shifted_relu:
      return {y > b.t0 ? 1.0 : 0.0, y >= b.t0 ? 1.0 : 0.0};
    case BuiltinKind::double_kink: {
      const double left = y <= b.t0 ? b.s0 : (y <= b.t1 ? b.s1 : b.s2);
      const double right = y < b.t0 ? b.s0 : (y < b.t1 ? b.s1 : b.s2);
      return {left, right};
    }
  }
  return {0.0, 0.0};
}

namespace {

double knot_segment_slope(const KnotTable& t, long j) {
  if (j < 0) return t.left_slope;
  if (j >= static_cast<long>(t.knots.size()) - 1) return t.right_slope;
  return (t.values[j + 1] - t.values[j]) / (t.knots[j + 1] - t.knots[j]);
}

}  // namespace

double Section::knot_value(const KnotTable& t, double y) const {
  const auto& k = t.knots;
  if (y <= k.front()) return t.values.front() + t.left_slope * (y - k.front());
  if (y >= k.back()) return t.values.back() + t.right_slope * (y - k.back());
  const long j = std::upper_bound(k.begin(), k.end(), y) - k.begin() - 1;
  const double theta = (y - k[j]) / (k[j + 1] - k[j]);
  return (1.0 - theta) * t.values[j] + theta * t.values[j + 1];
}

std::pair<double, double> Section::knot_slopes(const KnotTable& t, double y) const {
  const auto& k = t.knots;
  const long left = std::lower_bound(k.begin(), k.end(), y) - k.begin() - 1;
  const long right = std::upper_bound(k.begin(), k.end(), y) - k.begin() - 1;
  return {knot_segment_slope(t, left), knot_segment_slope(t, right)};
}

double Section::value(double y) const {
  if (net_) return network_value(y);
  if (const auto* b = std::get_if<Builtin>(&nl_->repr())) return builtin_value(*b, y);
  return knot_value(std::get<KnotTable>(nl_->repr()), y);
}

double Section::dir_deriv(double y, double h) const {
  if (net_) return network_tangent(y, h, Mode::exact_dir, 0.0);
  const auto [left, right] = one_sided(y);
  return h >= 0.0 ? right * h : left * h;
}

std::pair<double, double> Section::one_sided(double y) const {
  if (net_) return {-network_tangent(y, -1.0, Mode::exact_dir, 0.0), network_tangent(y, 1.0, Mode::exact_dir, 0.0)};
  if (const auto* b = std::get_if<Builtin>(&nl_->repr())) return builtin_slopes(*b, y);
  return knot_slopes(std::get<KnotTable>(nl_->repr()), y);
}

Interval Section::clarke(double y) const {
  const auto [left, right] = one_sided(y);
  return {std::min(left, right), std::max(left, right)};
}

Interval Section::clarke_window(double y, double radius) const {
  if (radius <= 0.0) return clarke(y);
  Interval out = clarke(y);
  auto absorb = [&](double v) {
    const Interval c = clarke(v);
    out.lo = std::min(out.lo, c.lo);
    out.hi = std::max(out.hi, c.hi);
  };
  absorb(y - radius);
  absorb(y + radius);
  for (double k : kinks(y - radius, y + radius, 4)) absorb(k);
  return out;
}

double Section::weak_gradient(double y) const {
  if (net_) return network_tangent(y, 1.0, Mode::weak_grad, 0.0);
  return one_sided(y).first;
}

bool Section::affine_on(double lo, double hi) const {
  if (!(lo < hi)) return true;
  if (!net_) {
    for (double k : nl_->explicit_kinks())
      if (k > lo && k < hi) return false;
    return true;
  }
  const auto& layers = net_->layers();
  network_value(lo);
  std::swap(pre_, pre_hi_);
  network_value(hi);
  std::swap(pre_, pre_hi_);
  // pre_ holds lo, pre_hi_ holds hi. Induction over layers: if no hidden preactivation changes
  // strict sign between the endpoints, every layer is affine on the window.
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    const Vector& a = pre_[l];
    const Vector& b = pre_hi_[l];
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if ((a(i) < 0.0 && b(i) > 0.0) || (a(i) > 0.0 && b(i) < 0.0)) return false;
  }
  return true;
}

void Section::collect_network_kinks(double lo, double hi, double resolution, std::vector<double>& out) const {
  if (affine_on(lo, hi)) return;
  const double mid = 0.5 * (lo + hi);
  if (hi - lo <= resolution * std::max(1.0, std::abs(mid)) || mid <= lo || mid >= hi) {
    const double left = one_sided(lo).first;
    const double right = one_sided(hi).second;
    if (std::abs(left - right) > 1e-12 * (1.0 + std::abs(left) + std::abs(right))) out.push_back(mid);
    return;
  }
  collect_network_kinks(lo, mid, resolution, out);
  const auto [l, r] = one_sided(mid);
  if (l != r && affine_on(lo, mid) && affine_on(mid, hi)) out.push_back(mid);
  collect_network_kinks(mid, hi, resolution, out);
}

std::vector<double> Section::kinks(double lo, double hi, int samples, double resolution) const {
  std::vector<double> out;
  if (!net_) {
    for (double k : nl_->explicit_kinks())
      if (k >= lo && k <= hi) out.push_back(k);
    return out;
  }
  samples = std::max(samples, 1);
  const double width = (hi - lo) / samples;
  for (int c = 0; c < samples; ++c) {
    const double a = lo + c * width;
    const double b = (c + 1 == samples) ? hi : lo + (c + 1) * width;
    collect_network_kinks(a, b, resolution, out);
    if (c + 1 < samples) {
      const auto [l, r] = one_sided(b);
      if (l != r) out.push_back(b);
    }
  }
  for (double end : {lo, hi}) {
    const auto [l, r] = one_sided(end);
    if (l != r) out.push_back(end);
  }
  std::sort(out.begin(), out.end());
  std::vector<double> merged;
  for (double k : out)
    if (merged.empty() || k - merged.back() > 8.0 * resolution * std::max(1.0, std::abs(k))) merged.push_back(k);
  return merged;
}

double Section::mollified_value(const Mollifier& moll, double y) const {
  const double eps = moll.epsilon();
  if (affine_on(y - eps, y + eps)) return value(y);
  const auto s = moll.offsets();
  const auto w = moll.weights();
  double total = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) total += w[j] * value(y - s[j]);
  return total;
}

double Section::mollified_deriv(const Mollifier& moll, double y) const {
  const double eps = moll.epsilon();
  if (affine_on(y - eps, y + eps)) return weak_gradient(y);
  const auto s = moll.offsets();
  const auto w = moll.weights();
  double total = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) total += w[j] * weak_gradient(y - s[j]);
  return total;
}

double Section::canonical_value(double eps, double y) const {
  if (!net_) throw ParameterError("canonical smoothing requires a network nonlinearity");
  if (!(eps > 0.0)) throw ParameterError("canonical smoothing: epsilon must be positive");
  return network_canonical_value(eps, y);
}

double Section::canonical_deriv(double eps, double y) const {
  if (!net_) throw ParameterError("canonical smoothing requires a network nonlinearity");
  if (!(eps > 0.0)) throw ParameterError("canonical smoothing: epsilon must be positive");
  return network_tangent(y, 1.0, Mode::canonical, eps);
}

// ---------------------------------------------------------------------------------------------
// Free functions

double eval(const Nonlinearity& nl, const Eigen::Ref<const Vector>& x, double y) { return Section(nl, x).value(y); }

double dir_deriv(const Nonlinearity& nl, const Eigen::Ref<const Vector>& x, double y, double h) {
  return Section(nl, x).dir_deriv(y, h);
}

std::pair<double, double> one_sided_derivs(const Nonlinearity& nl, const Eigen::Ref<const Vector>& x, double y) {
  return Section(nl, x).one_sided(y);
}

Interval clarke_interval(const Nonlinearity& nl, const Eigen::Ref<const Vector>& x, double y) {
  return Section(nl, x).clarke(y);
}

double weak_gradient_y(const Nonlinearity& nl, const Eigen::Ref<const Vector>& x, double y) {
  return Section(nl, x).weak_gradient(y);
}

double mollified_eval(const Nonlinearity& nl, const Mollifier& moll, const Eigen::Ref<const Vector>& x, double y) {
  return Section(nl, x).mollified_value(moll, y);
}

double mollified_deriv_y(const Nonlinearity& nl, const Mollifier& moll, const Eigen::Ref<const Vector>& x,
                         double y) {
  return Section(nl, x).mollified_deriv(moll, y);
}

double canonical_smooth_eval(const ReluNetwork& net, double eps, const Eigen::Ref<const Vector>& x, double y) {
  const auto nl = Nonlinearity::network(net);
  return Section(nl, x).canonical_value(eps, y);
}

double canonical_smooth_deriv(const ReluNetwork& net, double eps, const Eigen::Ref<const Vector>& x, double y) {
  const auto nl = Nonlinearity::network(net);
  return Section(nl, x).canonical_deriv(eps, y);
}

// ---------------------------------------------------------------------------------------------
// Monotonicity

MonotonicityReport check_monotone(const Nonlinearity& nl, const Matrix& x_samples, double window, int y_samples,
                                  double tol) {
  if (!(window > 0.0)) throw ParameterError("check_monotone: window M must be positive");
  if (y_samples < 2) throw ParameterError("check_monotone: need at least two y samples");
  MonotonicityReport report;
  report.tolerance = tol;
  report.window = window;
  report.y_samples = y_samples;
  report.min_slope = std::numeric_limits<double>::infinity();

  Matrix points = x_samples;
  if (points.cols() == 0) {
    if (nl.is_network() && nl.spatial_dim().value() > 0)
      throw ParameterError("check_monotone: network nonlinearity needs spatial sample points");
    points.resize(nl.spatial_dim().value_or(0), 1);
  }
  report.x_samples = static_cast<std::size_t>(points.cols());

  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    const Vector x = points.col(c);
    Section section(nl, x);
    auto inspect = [&](double y) {
      const auto [left, right] = section.one_sided(y);
      const double slope = std::min(left, right);
      ++report.points_checked;
      if (slope < report.min_slope) {
        report.min_slope = slope;
        report.witness_x = x;
        report.witness_y = y;
      }
    };
    for (int i = 0; i < y_samples; ++i) inspect(-window + 2.0 * window * i / (y_samples - 1));
    for (double k : section.kinks(-window, window, y_samples)) inspect(k);
  }
  report.certified = report.min_slope >= -tol;
  return report;
}

MonotonicityReport certify(Nonlinearity& nl, const Matrix& x_samples, double window, int y_samples, double tol) {
  auto report = check_monotone(nl, x_samples, window, y_samples, tol);
  nl.set_monotone_certified(report.certified);
  return report;
}

// ---------------------------------------------------------------------------------------------
// Constructive approximation

ReluNetwork construct_interpolant_net(std::span<const double> knots, std::span<const double> values,
                                      std::pair<double, double> end_slopes, int spatial_dim) {
  if (knots.empty()) throw ParameterError("construct_interpolant_net: at least one knot required");
  if (knots.size() != values.size())
    throw DimensionError("construct_interpolant_net values", static_cast<long>(knots.size()),
                         static_cast<long>(values.size()));
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    if (!(knots[i] < knots[i + 1]))
      throw ParameterError("construct_interpolant_net: knots must be strictly increasing");
  if (spatial_dim < 0) throw ParameterError("construct_interpolant_net: negative spatial dimension");

  std::vector<double> slopes{end_slopes.first};
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    slopes.push_back((values[i + 1] - values[i]) / (knots[i + 1] - knots[i]));
  slopes.push_back(end_slopes.second);

  const bool linear_part = end_slopes.first != 0.0;
  const Eigen::Index hidden = static_cast<Eigen::Index>(knots.size()) + (linear_part ? 2 : 0);
  const int n0 = spatial_dim + 1;

  DenseLayer first{Matrix::Zero(hidden, n0), Vector::Zero(hidden)};
  DenseLayer second{Matrix::Zero(1, hidden), Vector::Zero(1)};
  Eigen::Index row = 0;
  if (linear_part) {
    // s_left * y = s_left * (max(0, y) - max(0, -y))
    first.weights(0, spatial_dim) = 1.0;
    first.weights(1, spatial_dim) = -1.0;
    second.weights(0, 0) = end_slopes.first;
    second.weights(0, 1) = -end_slopes.first;
    row = 2;
  }
  for (std::size_t i = 0; i < knots.size(); ++i, ++row) {
    first.weights(row, spatial_dim) = 1.0;
    first.bias(row) = -knots[i];
    second.weights(0, row) = slopes[i + 1] - slopes[i];
  }
  second.bias(0) = values[0] - end_slopes.first * knots[0];

  ReluNetwork net({std::move(first), std::move(second)});
  net.set_monotone_certified(all_nonnegative(slopes));
  return net;
}

ReluNetwork to_network(const Nonlinearity& nl, int spatial_dim) {
  if (const auto* net = nl.as_network()) {
    if (net->spatial_dim() != spatial_dim) throw DimensionError("to_network spatial dim", spatial_dim, net->spatial_dim());
    return *net;
  }
  if (const auto* t = std::get_if<KnotTable>(&nl.repr()))
    return construct_interpolant_net(t->knots, t->values, {t->left_slope, t->right_slope}, spatial_dim);
  const auto& b = std::get<Builtin>(nl.repr());
  switch (b.kind) {
    case BuiltinKind::zero: {
      const std::vector<double> k{0.0}, v{0.0};
      return construct_interpolant_net(k, v, {0.0, 0.0}, spatial_dim);
    }
    case BuiltinKind::identity: {
      const std::vector<double> k{0.0}, v{0.0};
      return construct_interpolant_net(k, v, {1.0, 1.0}, spatial_dim);
    }
    case BuiltinKind::relu: {
      const std::vector<double> k{0.0}, v{0.0};
      return construct_interpolant_net(k, v, {0.0, 1.0}, spatial_dim);
    }
    case BuiltinKind::shifted_relu: {
      const std::vector<double> k{b.t0}, v{0.0};
      return construct_interpolant_net(k, v, {0.0, 1.0}, spatial_dim);
    }
    case BuiltinKind::double_kink: {
      const std::vector<double> k{b.t0, b.t1}, v{0.0, b.s1 * (b.t1 - b.t0)};
      return construct_interpolant_net(k, v, {b.s0, b.s2}, spatial_dim);
    }
  }
  throw ParameterError("to_network: unsupported nonlinearity");
}

}  // namespace lipc
