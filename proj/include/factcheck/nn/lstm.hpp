#pragma once

#include <cstddef>
#include <string_view>

#include "factcheck/nn/functions.hpp"
#include "factcheck/nn/tensor_ref.hpp"
#include "factcheck/types.hpp"

namespace factcheck::nn {

// Standard LSTM. Gate rows are stacked [input; forget; candidate; output],
// each block `hidden` rows tall.
struct LstmParams {
  Matrix w;  // 4h x input
  Matrix u;  // 4h x h
  Vector b;  // 4h

  static LstmParams zeros(std::size_t input, std::size_t hidden);
  // Glorot weights, zero bias except forget gate = 1.
  static LstmParams random(std::size_t input, std::size_t hidden, Rng& rng);

  std::size_t input_dim() const { return static_cast<std::size_t>(w.cols()); }
  std::size_t hidden_dim() const { return static_cast<std::size_t>(u.cols()); }
  void collect(std::string_view prefix, TensorList& out);
};

struct LstmState {
  Vector h;
  Vector c;
};

// One step: i, f, o = sigmoid, g = tanh, c = f*c_prev + i*g, h = o*tanh(c).
LstmState lstm_cell_forward(const Vector& x, const Vector& h_prev, const Vector& c_prev,
                            const LstmParams& params);

// Activations kept by the sequence forward pass for backpropagation.
struct LstmTrace {
  Matrix x;       // T x input
  Matrix gates;   // T x 4h, post-activation
  Matrix c;       // T x h
  Matrix tanh_c;  // T x h
  Matrix h;       // T x h
};

// Runs from zero state over the rows of x; returns T x h.
Matrix lstm_forward(const Matrix& x, const LstmParams& params, LstmTrace* trace = nullptr);

// dh: T x h loss gradient w.r.t. each output row. Accumulates parameter
// gradients into `grad` and returns T x input gradient w.r.t. x.
Matrix lstm_backward(const Matrix& dh, const LstmParams& params, const LstmTrace& trace,
                     LstmParams& grad);

struct BiLstmParams {
  LstmParams forward;
  LstmParams backward;

  static BiLstmParams zeros(std::size_t input, std::size_t hidden);
  static BiLstmParams random(std::size_t input, std::size_t hidden, Rng& rng);

  std::size_t input_dim() const { return forward.input_dim(); }
  std::size_t hidden_dim() const { return forward.hidden_dim(); }
  std::size_t output_dim() const { return 2 * forward.hidden_dim(); }
  void collect(std::string_view prefix, TensorList& out);
};

struct BiLstmTrace {
  LstmTrace forward;
  LstmTrace backward;  // over the reversed sequence
};

// T x 2h; row t = [forward state after x_t ; backward state after x_t],
// where the backward pass reads x_{T-1} .. x_0. Throws for T = 0.
Matrix bilstm_encode(const Matrix& x, const BiLstmParams& params, BiLstmTrace* trace = nullptr);

Matrix bilstm_backward(const Matrix& d_out, const BiLstmParams& params, const BiLstmTrace& trace,
                       BiLstmParams& grad);

}  // namespace factcheck::nn
