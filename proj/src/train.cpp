#include "lipc/train.hpp"

#include "lipc/rng.hpp"

#include <cmath>
#include <limits>

namespace lipc {

namespace {

// Batched forward pass; returns the output row and fills preactivations per layer.
Eigen::RowVectorXd forward(const std::vector<DenseLayer>& layers, const Matrix& inputs, std::vector<Matrix>& pre) {
  pre.resize(layers.size());
  Matrix act = inputs;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    pre[l] = layers[l].weights * act;
    pre[l].colwise() += layers[l].bias;
    if (l + 1 < layers.size()) act = pre[l].cwiseMax(0.0);
  }
  return pre.back().row(0);
}

}  // namespace

double mean_squared_loss(const ReluNetwork& net, const TrainingData& data) {
  std::vector<Matrix> pre;
  const Eigen::RowVectorXd out = forward(net.layers(), data.inputs, pre);
  return (out.transpose() - data.targets).squaredNorm() / static_cast<double>(data.targets.size());
}

TrainingResult train_net(const TrainingData& data, const TrainingConfig& config) {
  const auto n = data.targets.size();
  if (n == 0 || data.inputs.cols() == 0) throw ParameterError("train_net: training data is empty");
  if (data.inputs.cols() != n) throw DimensionError("train_net sample count", n, data.inputs.cols());
  const auto& sizes = config.layer_sizes;
  if (sizes.size() < 2) throw ParameterError("train_net: architecture needs at least input and output sizes");
  if (sizes.front() != data.inputs.rows()) throw DimensionError("train_net input size", data.inputs.rows(), sizes.front());
  if (sizes.back() != 1) throw DimensionError("train_net output size", 1, sizes.back());
  if (config.iterations < 0 || !(config.learning_rate > 0.0)) throw ParameterError("train_net: bad hyperparameters");

  CounterRng rng(config.seed, 0x7472616eULL);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    DenseLayer layer{Matrix(sizes[l], sizes[l - 1]), Vector::Zero(sizes[l])};
    const double scale = std::sqrt(2.0 / sizes[l - 1]);
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) layer.weights(r, c) = scale * rng.next_normal();
    layers.push_back(std::move(layer));
  }

  TrainingResult result;
  result.best_loss = std::numeric_limits<double>::infinity();
  std::vector<DenseLayer> best = layers;
  std::vector<Matrix> pre;
  const double inv_n = 1.0 / static_cast<double>(n);

  for (int it = 0; it <= config.iterations; ++it) {
    const Eigen::RowVectorXd out = forward(layers, data.inputs, pre);
    const Eigen::RowVectorXd residual = out - data.targets.transpose();
    const double loss = residual.squaredNorm() * inv_n;
    result.final_loss = loss;
    if (loss < result.best_loss) {
      result.best_loss = loss;
      result.best_iteration = it;
      best = layers;
    }
    if (it == config.iterations || !std::isfinite(loss)) break;

    // Backward pass: delta holds dLoss/dpreactivation for the current layer.
    Matrix delta = 2.0 * inv_n * residual;
    for (std::size_t l = layers.size(); l-- > 0;) {
      const Matrix input_act = (l == 0) ? data.inputs : Matrix(pre[l - 1].cwiseMax(0.0));
      const Matrix grad_w = delta * input_act.transpose();
      const Vector grad_b = delta.rowwise().sum();
      if (l > 0) {
        Matrix back = layers[l].weights.transpose() * delta;
        delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
      }
      layers[l].weights -= config.learning_rate * grad_w;
      layers[l].bias -= config.learning_rate * grad_b;
    }
  }
  result.net = ReluNetwork(std::move(best));
  return result;
}

}  // namespace lipc
