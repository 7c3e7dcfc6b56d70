#include "factcheck/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace factcheck::nn {

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::sgd ? "sgd" : "adam"; }

Optimizer::Optimizer(OptimizerKind kind, double learning_rate)
    : kind_(kind), learning_rate_(learning_rate) {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

void Optimizer::step(const TensorList& params, const TensorList& grads) {
  if (params.size() != grads.size()) throw std::invalid_argument("optimizer: tensor count mismatch");
  ++steps_;
  if (kind_ == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto p = params[i].values;
      auto g = grads[i].values;
      for (std::size_t k = 0; k < p.size(); ++k) p[k] -= learning_rate_ * g[k];
    }
    return;
  }

  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  if (first_moment_.empty()) {
    for (const auto& p : params) {
      first_moment_.emplace_back(p.values.size(), 0.0);
      second_moment_.emplace_back(p.values.size(), 0.0);
    }
  }
  const double t = static_cast<double>(steps_);
  const double correction1 = 1.0 - std::pow(beta1, t);
  const double correction2 = 1.0 - std::pow(beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].values;
    auto g = grads[i].values;
    auto& m = first_moment_[i];
    auto& v = second_moment_[i];
    if (m.size() != p.size()) throw std::invalid_argument("optimizer: parameter layout changed");
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
      v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
      p[k] -= learning_rate_ * (m[k] / correction1) / (std::sqrt(v[k] / correction2) + eps);
    }
  }
}

}  // namespace factcheck::nn

#include "factcheck/nn/train_config.hpp"

namespace factcheck::nn {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) throw std::invalid_argument("keep_prob must be in (0, 1]");
  if (epochs == 0) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
}

}  // namespace factcheck::nn
