#pragma once

// Dense inner loops shared by the recurrent encoders, attention and snippet
// scoring. Each kernel exists twice: `serial` is the reference, `parallel`
// splits the outer loop across OpenMP threads. Every output element is
// produced by exactly one thread with the same summation order as the
// serial loop, so the two are bitwise identical.

#include <cstddef>
#include <span>
#include <vector>

#include "factcheck/types.hpp"

namespace factcheck::kernels {

// Work (outer * inner) below which the parallel kernels stay on one thread.
inline constexpr std::size_t kParallelGrain = 4096;

namespace serial {

// out(t, r) = sum_c x(t, c) * w(r, c) + bias(r); bias may be empty.
void project(const Matrix& x, const Matrix& w, const Vector& bias, Matrix& out);
// grad_w(r, c) += sum_t dy(t, r) * x(t, c)
void accumulate_weight_grad(const Matrix& dy, const Matrix& x, Matrix& grad_w);
// dx(t, c) = sum_r dy(t, r) * w(r, c)
void backprop_input(const Matrix& dy, const Matrix& w, Matrix& dx);
// out[i] = mean of table rows listed in ids[i]; zero row for an empty list.
void mean_rows(const Matrix& table, const std::vector<std::vector<std::size_t>>& ids, Matrix& out);
// out[i] = cosine(query, rows.row(i))
void cosine_rows(const Vector& query, const Matrix& rows, std::vector<double>& out);

}  // namespace serial

namespace parallel {

void project(const Matrix& x, const Matrix& w, const Vector& bias, Matrix& out);
void accumulate_weight_grad(const Matrix& dy, const Matrix& x, Matrix& grad_w);
void backprop_input(const Matrix& dy, const Matrix& w, Matrix& dx);
void mean_rows(const Matrix& table, const std::vector<std::vector<std::size_t>>& ids, Matrix& out);
void cosine_rows(const Vector& query, const Matrix& rows, std::vector<double>& out);

}  // namespace parallel

// Cosine similarity clamped to [-1, 1]; 0 when either norm is 0.
double cosine(std::span<const double> u, std::span<const double> v);

using parallel::accumulate_weight_grad;
using parallel::backprop_input;
using parallel::cosine_rows;
using parallel::mean_rows;
using parallel::project;

// Threads the parallel kernels and batch loops may use (1 without OpenMP).
int max_threads();

}  // namespace factcheck::kernels
