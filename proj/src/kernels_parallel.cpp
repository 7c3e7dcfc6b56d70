#include <stdexcept>

#include "factcheck/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace factcheck::kernels {
namespace {

// Nested regions would only oversubscribe; batch loops already fan out.
bool go_parallel(std::size_t outer, std::size_t inner) {
#ifdef _OPENMP
  return outer > 1 && outer * inner >= kParallelGrain && !omp_in_parallel();
#else
  (void)outer;
  (void)inner;
  return false;
#endif
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace parallel {

void project(const Matrix& x, const Matrix& w, const Vector& bias, Matrix& out) {
  const auto T = x.rows(), R = w.rows(), C = w.cols();
  if (x.cols() != C) throw std::invalid_argument("project: inner dimension mismatch");
  if (bias.size() != 0 && bias.size() != R) throw std::invalid_argument("project: bias size mismatch");
  out.resize(T, R);
  const bool has_bias = bias.size() != 0;
#pragma omp parallel for schedule(static) if (go_parallel(T, R * C))
  for (Eigen::Index t = 0; t < T; ++t) {
    const double* xr = x.data() + t * C;
    for (Eigen::Index r = 0; r < R; ++r) {
      const double* wr = w.data() + r * C;
      double acc = has_bias ? bias[r] : 0.0;
      for (Eigen::Index c = 0; c < C; ++c) acc += xr[c] * wr[c];
      out(t, r) = acc;
    }
  }
}

void accumulate_weight_grad(const Matrix& dy, const Matrix& x, Matrix& grad_w) {
  const auto T = dy.rows(), R = dy.cols(), C = x.cols();
  if (x.rows() != T || grad_w.rows() != R || grad_w.cols() != C)
    throw std::invalid_argument("accumulate_weight_grad: shape mismatch");
#pragma omp parallel for schedule(static) if (go_parallel(R, T * C))
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
#pragma omp parallel for schedule(static) if (go_parallel(T, R * C))
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
  const auto n = static_cast<Eigen::Index>(ids.size());
  out.setZero(n, C);
#pragma omp parallel for schedule(dynamic, 8) if (go_parallel(ids.size(), 64 * C))
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row_ids = ids[static_cast<std::size_t>(i)];
    if (row_ids.empty()) continue;
    double* o = out.data() + i * C;
    for (auto id : row_ids) {
      const double* src = table.data() + static_cast<Eigen::Index>(id) * C;
      for (Eigen::Index c = 0; c < C; ++c) o[c] += src[c];
    }
    const double count = static_cast<double>(row_ids.size());
    for (Eigen::Index c = 0; c < C; ++c) o[c] /= count;
  }
}

void cosine_rows(const Vector& query, const Matrix& rows, std::vector<double>& out) {
  const auto C = rows.cols();
  if (query.size() != C) throw std::invalid_argument("cosine: dimension mismatch");
  const auto n = rows.rows();
  out.assign(static_cast<std::size_t>(n), 0.0);
  std::span<const double> q(query.data(), static_cast<std::size_t>(C));
#pragma omp parallel for schedule(static) if (go_parallel(n, C))
  for (Eigen::Index i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        cosine(q, std::span<const double>(rows.data() + i * C, static_cast<std::size_t>(C)));
}

}  // namespace parallel
}  // namespace factcheck::kernels
