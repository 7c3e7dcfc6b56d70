#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "factcheck/nn/tensor_ref.hpp"

namespace factcheck::nn {

enum class OptimizerKind { sgd, adam };

OptimizerKind parse_optimizer(std::string_view name);
std::string_view to_string(OptimizerKind kind);

// Plain SGD or Adam (beta1 0.9, beta2 0.999, eps 1e-8). Adam moments are
// allocated lazily on the first step and keyed by tensor position.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate);

  void step(const TensorList& params, const TensorList& grads);

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return learning_rate_; }

 private:
  OptimizerKind kind_;
  double learning_rate_;
  std::size_t steps_ = 0;
  std::vector<std::vector<double>> first_moment_;
  std::vector<std::vector<double>> second_moment_;
};

}  // namespace factcheck::nn
