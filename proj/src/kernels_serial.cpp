#include <cmath>
#include <stdexcept>

#include "factcheck/kernels.hpp"

namespace factcheck::kernels {

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dot += u[k] * v[k];
    nu += u[k] * u[k];
    nv += v[k] * v[k];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
}

namespace serial {

void project(const Matrix& x, const Matrix& w, const Vector& bias, Matrix& out) {
  const auto T = x.rows(), R = w.rows(), C = w.cols();
  if (x.cols() != C) throw std::invalid_argument("project: inner dimension mismatch");
  if (bias.size() != 0 && bias.size() != R) throw std::invalid_argument("project: bias size mismatch");
  out.resize(T, R);
  for (Eigen::Index t = 0; t < T; ++t) {
    const double* xr = x.data() + t * C;
    for (Eigen::Index r = 0; r < R; ++r) {
      const double* wr = w.data() + r * C;
      double acc = bias.size() ? bias[r] : 0.0;
      for (Eigen::Index c = 0; c < C; ++c) acc += xr[c] * wr[c];
      out(t, r) = acc;
    }
  }
}

void accumulate_weight_grad(const Matrix& dy, const Matrix& x, Matrix& grad_w) {
  const auto T = dy.rows(), R = dy.cols(), C = x.cols();
  if (x.rows() != T || grad_w.rows() != R || grad_w.cols() != C)
    throw std::invalid_argument("accumulate_weight_grad: shape mismatch");
  for (Eigen::Index r = 0; r < R; ++r) {
    double* gr = grad_w.data() + r * C;
    for (Eigen::Index t = 0; t < T; ++t) {
      const double a = dy(t, r);
      if (a == 0.0) continue;
      const double* xr = x.data() + t * C;
      for (Eigen::Index c = 0; c < C; ++c) gr[c] += a * xr[c];
    }
  }
}

void backprop_input(const Matrix& dy, const Matrix& w, Matrix& dx) {
  const auto T = dy.rows(), R = dy.cols(), C = w.cols();
  if (w.rows() != R) throw std::invalid_argument("backprop_input: shape mismatch");
  dx.setZero(T, C);
  for (Eigen::Index t = 0; t < T; ++t) {
    double* out = dx.data() + t * C;
    for (Eigen::Index r = 0; r < R; ++r) {
      const double a = dy(t, r);
      if (a == 0.0) continue;
      const double* wr = w.data() + r * C;
      for (Eigen::Index c = 0; c < C; ++c) out[c] += a * wr[c];
    }
  }
}

void mean_rows(const Matrix& table, const std::vector<std::vector<std::size_t>>& ids, Matrix& out) {
  const auto C = table.cols();
  out.setZero(static_cast<Eigen::Index>(ids.size()), C);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i].empty()) continue;
    double* o = out.data() + static_cast<Eigen::Index>(i) * C;
    for (auto id : ids[i]) {
      const double* src = table.data() + static_cast<Eigen::Index>(id) * C;
      for (Eigen::Index c = 0; c < C; ++c) o[c] += src[c];
    }
    const double n = static_cast<double>(ids[i].size());
    for (Eigen::Index c = 0; c < C; ++c) o[c] /= n;
  }
}

void cosine_rows(const Vector& query, const Matrix& rows, std::vector<double>& out) {
  const auto C = rows.cols();
  if (query.size() != C) throw std::invalid_argument("cosine: dimension mismatch");
  out.assign(static_cast<std::size_t>(rows.rows()), 0.0);
  std::span<const double> q(query.data(), static_cast<std::size_t>(C));
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    out[static_cast<std::size_t>(i)] =
        cosine(q, std::span<const double>(rows.data() + i * C, static_cast<std::size_t>(C)));
}

}  // namespace serial
}  // namespace factcheck::kernels
