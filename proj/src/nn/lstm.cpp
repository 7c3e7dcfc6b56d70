#include "factcheck/nn/lstm.hpp"

#include <stdexcept>

#include "factcheck/kernels.hpp"

namespace factcheck::nn {
namespace {

Matrix reversed_rows(const Matrix& m) { return m.colwise().reverse(); }

}  // namespace

LstmParams LstmParams::zeros(std::size_t input, std::size_t hidden) {
  const auto in = static_cast<Eigen::Index>(input);
  const auto h = static_cast<Eigen::Index>(hidden);
  return {Matrix::Zero(4 * h, in), Matrix::Zero(4 * h, h), Vector::Zero(4 * h)};
}

LstmParams LstmParams::random(std::size_t input, std::size_t hidden, Rng& rng) {
  auto p = zeros(input, hidden);
  glorot_fill(p.w, rng);
  glorot_fill(p.u, rng);
  const auto h = static_cast<Eigen::Index>(hidden);
  p.b.segment(h, h).setOnes();
  return p;
}

void LstmParams::collect(std::string_view prefix, TensorList& out) {
  const std::string p(prefix);
  out.push_back(tensor_ref(p + ".w", w));
  out.push_back(tensor_ref(p + ".u", u));
  out.push_back(tensor_ref(p + ".b", b));
}

LstmState lstm_cell_forward(const Vector& x, const Vector& h_prev, const Vector& c_prev,
                            const LstmParams& params) {
  const auto h = static_cast<Eigen::Index>(params.hidden_dim());
  if (x.size() != params.w.cols() || h_prev.size() != h || c_prev.size() != h)
    throw std::invalid_argument("lstm_cell_forward: dimension mismatch");
  const Vector z = params.w * x + params.u * h_prev + params.b;
  LstmState next{Vector(h), Vector(h)};
  for (Eigen::Index k = 0; k < h; ++k) {
    const double i = sigmoid(z[k]);
    const double f = sigmoid(z[h + k]);
    const double g = std::tanh(z[2 * h + k]);
    const double o = sigmoid(z[3 * h + k]);
    next.c[k] = f * c_prev[k] + i * g;
    next.h[k] = o * std::tanh(next.c[k]);
  }
  return next;
}

Matrix lstm_forward(const Matrix& x, const LstmParams& params, LstmTrace* trace) {
  const auto T = x.rows();
  const auto h = static_cast<Eigen::Index>(params.hidden_dim());
  if (x.cols() != params.w.cols()) throw std::invalid_argument("lstm_forward: input dimension mismatch");

  Matrix pre;
  kernels::project(x, params.w, params.b, pre);  // T x 4h

  Matrix gates(T, 4 * h), c(T, h), tanh_c(T, h), out(T, h);
  Vector h_prev = Vector::Zero(h), c_prev = Vector::Zero(h);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Vector z = pre.row(t).transpose() + params.u * h_prev;
    for (Eigen::Index k = 0; k < h; ++k) {
      const double i = sigmoid(z[k]);
      const double f = sigmoid(z[h + k]);
      const double g = std::tanh(z[2 * h + k]);
      const double o = sigmoid(z[3 * h + k]);
      gates(t, k) = i;
      gates(t, h + k) = f;
      gates(t, 2 * h + k) = g;
      gates(t, 3 * h + k) = o;
      c(t, k) = f * c_prev[k] + i * g;
      tanh_c(t, k) = std::tanh(c(t, k));
      out(t, k) = o * tanh_c(t, k);
    }
    h_prev = out.row(t).transpose();
    c_prev = c.row(t).transpose();
  }
  if (trace) *trace = LstmTrace{x, std::move(gates), std::move(c), std::move(tanh_c), out};
  return out;
}

Matrix lstm_backward(const Matrix& dh, const LstmParams& params, const LstmTrace& trace,
                     LstmParams& grad) {
  const auto T = trace.h.rows();
  const auto h = static_cast<Eigen::Index>(params.hidden_dim());
  if (dh.rows() != T || dh.cols() != h) throw std::invalid_argument("lstm_backward: gradient shape mismatch");

  Matrix dz(T, 4 * h);
  Vector dh_next = Vector::Zero(h), dc_next = Vector::Zero(h);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const Vector dh_t = dh.row(t).transpose() + dh_next;
    Vector dc(h);
    for (Eigen::Index k = 0; k < h; ++k) {
      const double i = trace.gates(t, k);
      const double f = trace.gates(t, h + k);
      const double g = trace.gates(t, 2 * h + k);
      const double o = trace.gates(t, 3 * h + k);
      const double tc = trace.tanh_c(t, k);
      const double c_prev = t > 0 ? trace.c(t - 1, k) : 0.0;
      dc[k] = dh_t[k] * o * (1.0 - tc * tc) + dc_next[k];
      dz(t, k) = dc[k] * g * i * (1.0 - i);
      dz(t, h + k) = dc[k] * c_prev * f * (1.0 - f);
      dz(t, 2 * h + k) = dc[k] * i * (1.0 - g * g);
      dz(t, 3 * h + k) = dh_t[k] * tc * o * (1.0 - o);
      dc_next[k] = dc[k] * f;
    }
    dh_next = params.u.transpose() * dz.row(t).transpose();
  }

  // Recurrent weights see h_{t-1}: the output rows shifted down by one.
  Matrix h_prev = Matrix::Zero(T, h);
  if (T > 1) h_prev.bottomRows(T - 1) = trace.h.topRows(T - 1);
  kernels::accumulate_weight_grad(dz, trace.x, grad.w);
  kernels::accumulate_weight_grad(dz, h_prev, grad.u);
  grad.b += dz.colwise().sum().transpose();

  Matrix dx;
  kernels::backprop_input(dz, params.w, dx);
  return dx;
}

BiLstmParams BiLstmParams::zeros(std::size_t input, std::size_t hidden) {
  return {LstmParams::zeros(input, hidden), LstmParams::zeros(input, hidden)};
}

BiLstmParams BiLstmParams::random(std::size_t input, std::size_t hidden, Rng& rng) {
  auto fwd = LstmParams::random(input, hidden, rng);
  auto bwd = LstmParams::random(input, hidden, rng);
  return {std::move(fwd), std::move(bwd)};
}

void BiLstmParams::collect(std::string_view prefix, TensorList& out) {
  const std::string p(prefix);
  forward.collect(p + ".fwd", out);
  backward.collect(p + ".bwd", out);
}

Matrix bilstm_encode(const Matrix& x, const BiLstmParams& params, BiLstmTrace* trace) {
  if (x.rows() == 0) throw std::invalid_argument("bilstm_encode: empty sequence");
  const auto h = static_cast<Eigen::Index>(params.hidden_dim());
  Matrix fwd = lstm_forward(x, params.forward, trace ? &trace->forward : nullptr);
  Matrix bwd = lstm_forward(reversed_rows(x), params.backward, trace ? &trace->backward : nullptr);
  Matrix out(x.rows(), 2 * h);
  out.leftCols(h) = fwd;
  out.rightCols(h) = reversed_rows(bwd);
  return out;
}

Matrix bilstm_backward(const Matrix& d_out, const BiLstmParams& params, const BiLstmTrace& trace,
                       BiLstmParams& grad) {
  const auto h = static_cast<Eigen::Index>(params.hidden_dim());
  if (d_out.cols() != 2 * h) throw std::invalid_argument("bilstm_backward: gradient shape mismatch");
  Matrix dx = lstm_backward(d_out.leftCols(h), params.forward, trace.forward, grad.forward);
  Matrix dx_rev = lstm_backward(reversed_rows(d_out.rightCols(h)), params.backward, trace.backward, grad.backward);
  dx += reversed_rows(dx_rev);
  return dx;
}

}  // namespace factcheck::nn
