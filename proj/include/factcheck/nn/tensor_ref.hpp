#pragma once

#include <span>
#include <string>
#include <vector>

#include "factcheck/types.hpp"

namespace factcheck::nn {

// Named, mutable view over one parameter tensor. Parameter structs list
// their tensors in a fixed order so that a parameter set and its gradient
// set line up element by element.
struct TensorRef {
  std::string name;
  std::span<double> values;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
};

using TensorList = std::vector<TensorRef>;

inline TensorRef tensor_ref(std::string name, Matrix& m) {
  return {std::move(name), std::span<double>(m.data(), static_cast<std::size_t>(m.size())), m.rows(), m.cols()};
}

inline TensorRef tensor_ref(std::string name, Vector& v) {
  return {std::move(name), std::span<double>(v.data(), static_cast<std::size_t>(v.size())), v.size(), 1};
}

inline void set_zero(const TensorList& tensors) {
  for (const auto& t : tensors)
    for (double& x : t.values) x = 0.0;
}

// dst += src, element by element. Lists must have been produced by the same
// parameter layout.
void add_into(const TensorList& dst, const TensorList& src);
void scale(const TensorList& tensors, double factor);
bool all_finite(const TensorList& tensors);

}  // namespace factcheck::nn
