#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "factcheck/nn/tensor_ref.hpp"

namespace testsupport {

struct TensorCheck {
  std::string name;
  double relative_error = 0.0;
  double analytic_norm = 0.0;
};

// Compares analytic gradients against central differences, one tensor at a
// time: ||a - n|| / max(||a|| + ||n||, 1e-12) over every entry of the tensor.
// `loss` must re-evaluate the objective from the current parameter values.
inline std::vector<TensorCheck> check_gradients(const factcheck::nn::TensorList& params,
                                                const factcheck::nn::TensorList& analytic,
                                                const std::function<double()>& loss, double eps = 1e-4) {
  std::vector<TensorCheck> out;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      const double saved = p.values[i];
      p.values[i] = saved + eps;
      const double up = loss();
      p.values[i] = saved - eps;
      const double down = loss();
      p.values[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[k].values[i];
      diff2 += (a - numeric) * (a - numeric);
      a2 += a * a;
      n2 += numeric * numeric;
    }
    const double denom = std::max(std::sqrt(a2) + std::sqrt(n2), 1e-12);
    out.push_back({p.name, std::sqrt(diff2) / denom, std::sqrt(a2)});
  }
  return out;
}

inline double worst(const std::vector<TensorCheck>& checks) {
  double w = 0.0;
  for (const auto& c : checks) w = std::max(w, c.relative_error);
  return w;
}

}  // namespace testsupport
