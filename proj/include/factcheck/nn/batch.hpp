#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <vector>

#include "factcheck/kernels.hpp"
#include "factcheck/nn/tensor_ref.hpp"

namespace factcheck::nn {

// Sums per-item gradients into `total` in item order and returns the summed
// item losses. Items are evaluated in chunks, one zeroed buffer per item in
// the chunk, then folded into `total` serially; the floating-point result is
// therefore independent of thread count and of `parallel`.
//
// Grad must provide `TensorList tensors()`. make_zero() returns a zeroed
// gradient buffer; item(i, grad) adds item i's gradient into grad and returns
// its loss.
template <class Grad, class MakeZero, class Item>
double accumulate_gradients(std::size_t n_items, Grad& total, MakeZero make_zero, Item item, bool parallel) {
  const std::size_t chunk = parallel ? static_cast<std::size_t>(std::max(1, kernels::max_threads())) : 1;
  std::vector<Grad> buffers;
  buffers.reserve(chunk);
  for (std::size_t b = 0; b < std::min(chunk, n_items); ++b) buffers.push_back(make_zero());
  std::vector<double> losses(n_items, 0.0);

  for (std::size_t begin = 0; begin < n_items; begin += chunk) {
    const std::size_t end = std::min(n_items, begin + chunk);
    const auto count = static_cast<long>(end - begin);
    std::exception_ptr failure;
#pragma omp parallel for schedule(static, 1) if (parallel && count > 1)
    for (long k = 0; k < count; ++k) {
      try {
        auto& buf = buffers[static_cast<std::size_t>(k)];
        set_zero(buf.tensors());
        losses[begin + static_cast<std::size_t>(k)] = item(begin + static_cast<std::size_t>(k), buf);
      } catch (...) {
#pragma omp critical(factcheck_batch_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    const auto total_tensors = total.tensors();
    for (long k = 0; k < count; ++k) add_into(total_tensors, buffers[static_cast<std::size_t>(k)].tensors());
  }

  double loss = 0.0;
  for (double l : losses) loss += l;
  return loss;
}

}  // namespace factcheck::nn
