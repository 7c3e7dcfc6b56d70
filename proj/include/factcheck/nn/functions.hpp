#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "factcheck/types.hpp"

namespace factcheck::nn {

using Rng = std::mt19937_64;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Shift-stabilised softmax.
Vector softmax(const Vector& scores);

// Glorot-uniform fill.
void glorot_fill(Matrix& m, Rng& rng);

// Independent stream for (seed, a, b); used to derive per-epoch and
// per-example generators so that results do not depend on visiting order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace factcheck::nn
