#pragma once

#include <cstddef>
#include <cstdint>

#include "factcheck/nn/optimizer.hpp"

namespace factcheck::nn {

struct TrainConfig {
  double learning_rate = 0.001;
  double keep_prob = 0.3;  // dropout keep probability, training only
  std::size_t epochs = 10;
  std::size_t batch_size = 8;
  std::uint64_t seed = 1;
  OptimizerKind optimizer = OptimizerKind::sgd;
  // Fan per-item gradients out over OpenMP threads. Results are bitwise
  // identical either way.
  bool parallel = true;

  // Throws std::invalid_argument for keep_prob outside (0, 1],
  // non-positive learning rate, zero epochs or zero batch size.
  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;          // 0 = before training
  double train_loss = 0.0;        // mean cross-entropy over the training set, no dropout
  double validation_score = 0.0;  // model-specific selection metric
};

}  // namespace factcheck::nn
