#pragma once

#include <cstddef>
#include <string_view>

#include "factcheck/nn/functions.hpp"
#include "factcheck/nn/tensor_ref.hpp"
#include "factcheck/types.hpp"

namespace factcheck::nn {

// Additive attention conditioned on a claim vector and an aspect vector:
//   e_j = v . tanh(W_s s_j + W_c claim + W_a aspect + b),  weights = softmax(e)
struct AttentionParams {
  Matrix w_state;   // A x m
  Matrix w_claim;   // A x m_claim
  Matrix w_aspect;  // A x d_aspect
  Vector bias;      // A
  Vector v;         // A

  static AttentionParams zeros(std::size_t attention_dim, std::size_t state_dim,
                               std::size_t claim_dim, std::size_t aspect_dim);
  static AttentionParams random(std::size_t attention_dim, std::size_t state_dim,
                                std::size_t claim_dim, std::size_t aspect_dim, Rng& rng);

  std::size_t attention_dim() const { return static_cast<std::size_t>(w_state.rows()); }
  void collect(std::string_view prefix, TensorList& out);
};

struct AttentionOutput {
  Vector context;  // m
  Vector weights;  // N, sums to 1
  Vector scores;   // N, pre-softmax
  Matrix hidden;   // N x A, tanh activations
};

// states: N x m with N >= 1.
AttentionOutput conditioned_attention(const Matrix& states, const Vector& claim,
                                      const Vector& aspect, const AttentionParams& params);

struct AttentionInputGrads {
  Matrix d_states;
  Vector d_claim;
  Vector d_aspect;
};

AttentionInputGrads attention_backward(const Vector& d_context, const Matrix& states,
                                       const Vector& claim, const Vector& aspect,
                                       const AttentionParams& params, const AttentionOutput& out,
                                       AttentionParams& grad);

}  // namespace factcheck::nn
