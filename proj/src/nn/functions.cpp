#include "factcheck/nn/functions.hpp"

#include <stdexcept>

#include "factcheck/nn/tensor_ref.hpp"

namespace factcheck::nn {

Vector softmax(const Vector& scores) {
  if (scores.size() == 0) throw std::invalid_argument("softmax of empty vector");
  const double top = scores.maxCoeff();
  Vector out = (scores.array() - top).exp();
  out /= out.sum();
  return out;
}

void glorot_fill(Matrix& m, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finaliser applied to a combined key
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ b);
}

void add_into(const TensorList& dst, const TensorList& src) {
  if (dst.size() != src.size()) throw std::invalid_argument("add_into: tensor count mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    auto d = dst[i].values;
    auto s = src[i].values;
    if (d.size() != s.size()) throw std::invalid_argument("add_into: size mismatch for " + dst[i].name);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] += s[k];
  }
}

void scale(const TensorList& tensors, double factor) {
  for (const auto& t : tensors)
    for (double& x : t.values) x *= factor;
}

bool all_finite(const TensorList& tensors) {
  for (const auto& t : tensors)
    for (double x : t.values)
      if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace factcheck::nn
