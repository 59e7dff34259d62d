#pragma once

#include "lipc/network.hpp"
#include "lipc/rng.hpp"
#include "lipc/state.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace lipc::test {

// Random dense ReLU net with the given layer sizes (input first). Entries N(0, 1/fan_in).
inline ReluNetwork random_net(std::uint64_t seed, const std::vector<int>& sizes, bool zero_first_bias = false) {
  CounterRng rng(seed, 99);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    DenseLayer d{Matrix(sizes[l], sizes[l - 1]), Vector(sizes[l])};
    const double s = 1.0 / std::sqrt(static_cast<double>(sizes[l - 1]));
    for (Eigen::Index i = 0; i < d.weights.size(); ++i) d.weights.data()[i] = s * rng.next_normal();
    for (Eigen::Index i = 0; i < d.bias.size(); ++i) d.bias(i) = (l == 1 && zero_first_bias) ? 0.0 : 0.3 * rng.next_normal();
    layers.push_back(std::move(d));
  }
  return ReluNetwork(std::move(layers));
}

// Plain re-implementation of the layer recursion.
inline double naive_eval(const ReluNetwork& net, const std::vector<double>& input) {
  std::vector<double> a = input;
  const auto& L = net.layers();
  for (std::size_t l = 0; l < L.size(); ++l) {
    std::vector<double> z(L[l].weights.rows());
    for (Eigen::Index i = 0; i < L[l].weights.rows(); ++i) {
      double s = L[l].bias(i);
      for (Eigen::Index j = 0; j < L[l].weights.cols(); ++j) s += L[l].weights(i, j) * a[j];
      z[i] = (l + 1 < L.size()) ? std::max(0.0, s) : s;
    }
    a = std::move(z);
  }
  return a[0];
}

// The max-in-y net N(x, y) = max(0, y) with d spatial inputs.
inline ReluNetwork max_net(int d) {
  Matrix w1 = Matrix::Zero(1, d + 1);
  w1(0, d) = 1.0;
  return ReluNetwork({DenseLayer{w1, Vector::Zero(1)}, DenseLayer{Matrix::Ones(1, 1), Vector::Zero(1)}});
}

inline Nonlinearity certified_max_net(int d) {
  ReluNetwork n = max_net(d);
  n.set_monotone_certified(true);
  return Nonlinearity::network(n);
}

inline Vector sin_mode(const Grid& g) {
  return sample(g, [&](const Vector& x) {
    double v = 1.0;
    for (int a = 0; a < g.dim(); ++a) v *= std::sin(M_PI * x(a));
    return v;
  });
}

// State with a band of nodes exactly at the kink of max(0, y), and the control producing it
// for the max nonlinearity: u = -Delta_h y + max(0, y).
inline Vector kink_band_state(const Grid& g) {
  return sample(g, [&](const Vector& x) {
    const double s = std::sin(2 * M_PI * x(0)) * (g.dim() == 2 ? std::sin(M_PI * x(1)) : 1.0);
    return std::copysign(std::max(0.0, std::abs(s) - 0.3), s);
  });
}
inline Vector control_for_max_state(const Grid& g, const Vector& y) {
  return apply_laplacian(g, y) + y.cwiseMax(0.0);
}

// Dense -Delta_h for small-grid oracles.
inline Matrix dense_laplacian(const Grid& g) { return Matrix(laplacian_matrix(g)); }

}  // namespace lipc::test
