#pragma once

#include "lipc/network.hpp"

#include <cstdint>
#include <vector>

namespace lipc {

// Supervised samples: column j of `inputs` is (x_j, y_j) with y last; targets(j) = f(x_j, y_j).
struct TrainingData {
  Matrix inputs;
  Vector targets;
};

struct TrainingConfig {
  std::vector<int> layer_sizes;  // [d+1, hidden..., 1]
  int iterations = 20000;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
};

struct TrainingResult {
  ReluNetwork net;          // best iterate
  double best_loss = 0.0;   // mean squared error of `net`
  double final_loss = 0.0;  // mean squared error of the last iterate
  int best_iteration = 0;
};

// Full-batch gradient descent on the mean squared loss using the a.e. gradient (sigma'(0) = 0).
// Weights start He-scaled from CounterRng(seed); biases start at zero. Deterministic per seed.
TrainingResult train_net(const TrainingData& data, const TrainingConfig& config);

double mean_squared_loss(const ReluNetwork& net, const TrainingData& data);

}  // namespace lipc
