#pragma once

// Deterministic OpenMP reductions. Work is cut into fixed-size blocks whose
// partial results are combined in block order, so the parallel result is
// bit-identical to the serial one regardless of thread count.

#include <algorithm>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace adslate::parallel {

inline constexpr std::int64_t kBlock = 1024;

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Sum of body(t) for t in [0, count), accumulated per block then in block order.
template <class Body>
double block_sum(std::int64_t count, Body&& body) {
  const std::int64_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < blocks; ++b) {
    double acc = 0.0;
    const std::int64_t end = std::min(count, (b + 1) * kBlock);
    for (std::int64_t t = b * kBlock; t < end; ++t) acc += body(t);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

template <class Body>
double block_sum_serial(std::int64_t count, Body&& body) {
  double total = 0.0;
  for (std::int64_t b = 0; b * kBlock < count; ++b) {
    double acc = 0.0;
    const std::int64_t end = std::min(count, (b + 1) * kBlock);
    for (std::int64_t t = b * kBlock; t < end; ++t) acc += body(t);
    total += acc;
  }
  return total;
}

/// Element-wise vector sums of body(t, acc) over trials, same blocking rule.
template <class Body>
std::vector<double> block_vector_sum(std::int64_t count, std::size_t width, Body&& body) {
  const std::int64_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(blocks), std::vector<double>(width, 0.0));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < blocks; ++b) {
    auto& acc = partial[static_cast<std::size_t>(b)];
    const std::int64_t end = std::min(count, (b + 1) * kBlock);
    for (std::int64_t t = b * kBlock; t < end; ++t) body(t, acc);
  }
  std::vector<double> total(width, 0.0);
  for (const auto& p : partial)
    for (std::size_t k = 0; k < width; ++k) total[k] += p[k];
  return total;
}

template <class Body>
std::vector<double> block_vector_sum_serial(std::int64_t count, std::size_t width, Body&& body) {
  std::vector<double> total(width, 0.0), acc(width);
  for (std::int64_t b = 0; b * kBlock < count; ++b) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const std::int64_t end = std::min(count, (b + 1) * kBlock);
    for (std::int64_t t = b * kBlock; t < end; ++t) body(t, acc);
    for (std::size_t k = 0; k < width; ++k) total[k] += acc[k];
  }
  return total;
}

}  // namespace adslate::parallel
