#include "factcheck/nn/attention.hpp"

#include <stdexcept>

#include "factcheck/kernels.hpp"

namespace factcheck::nn {

AttentionParams AttentionParams::zeros(std::size_t attention_dim, std::size_t state_dim,
                                       std::size_t claim_dim, std::size_t aspect_dim) {
  const auto a = static_cast<Eigen::Index>(attention_dim);
  return {Matrix::Zero(a, static_cast<Eigen::Index>(state_dim)),
          Matrix::Zero(a, static_cast<Eigen::Index>(claim_dim)),
          Matrix::Zero(a, static_cast<Eigen::Index>(aspect_dim)), Vector::Zero(a), Vector::Zero(a)};
}

AttentionParams AttentionParams::random(std::size_t attention_dim, std::size_t state_dim,
                                        std::size_t claim_dim, std::size_t aspect_dim, Rng& rng) {
  auto p = zeros(attention_dim, state_dim, claim_dim, aspect_dim);
  glorot_fill(p.w_state, rng);
  glorot_fill(p.w_claim, rng);
  glorot_fill(p.w_aspect, rng);
  Matrix v(p.v.size(), 1);
  glorot_fill(v, rng);
  p.v = v.col(0);
  return p;
}

void AttentionParams::collect(std::string_view prefix, TensorList& out) {
  const std::string p(prefix);
  out.push_back(tensor_ref(p + ".w_state", w_state));
  out.push_back(tensor_ref(p + ".w_claim", w_claim));
  out.push_back(tensor_ref(p + ".w_aspect", w_aspect));
  out.push_back(tensor_ref(p + ".bias", bias));
  out.push_back(tensor_ref(p + ".v", v));
}

AttentionOutput conditioned_attention(const Matrix& states, const Vector& claim,
                                      const Vector& aspect, const AttentionParams& params) {
  if (states.rows() == 0) throw std::invalid_argument("attention over an empty sequence");
  if (states.cols() != params.w_state.cols() || claim.size() != params.w_claim.cols() ||
      aspect.size() != params.w_aspect.cols())
    throw std::invalid_argument("conditioned_attention: dimension mismatch");

  // The claim/aspect term is shared by every position; fold it into the bias.
  const Vector shared = params.w_claim * claim + params.w_aspect * aspect + params.bias;
  AttentionOutput out;
  kernels::project(states, params.w_state, shared, out.hidden);
  out.hidden = out.hidden.array().tanh();
  out.scores = out.hidden * params.v;
  out.weights = softmax(out.scores);
  out.context = states.transpose() * out.weights;
  return out;
}

AttentionInputGrads attention_backward(const Vector& d_context, const Matrix& states,
                                       const Vector& claim, const Vector& aspect,
                                       const AttentionParams& params, const AttentionOutput& out,
                                       AttentionParams& grad) {
  const auto n = states.rows();
  // context = sum_j w_j s_j
  const Vector d_weights = states * d_context;
  const double mean = out.weights.dot(d_weights);
  const Vector d_scores = out.weights.array() * (d_weights.array() - mean);

  grad.v += out.hidden.transpose() * d_scores;
  // d pre-activation, N x A
  Matrix d_pre = (d_scores * params.v.transpose()).array() * (1.0 - out.hidden.array().square());
  const Vector d_shared = d_pre.colwise().sum().transpose();

  kernels::accumulate_weight_grad(d_pre, states, grad.w_state);
  grad.w_claim += d_shared * claim.transpose();
  grad.w_aspect += d_shared * aspect.transpose();
  grad.bias += d_shared;

  AttentionInputGrads in;
  kernels::backprop_input(d_pre, params.w_state, in.d_states);
  for (Eigen::Index j = 0; j < n; ++j) in.d_states.row(j) += out.weights[j] * d_context.transpose();
  in.d_claim = params.w_claim.transpose() * d_shared;
  in.d_aspect = params.w_aspect.transpose() * d_shared;
  return in;
}

}  // namespace factcheck::nn
