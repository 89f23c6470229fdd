#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "adslate/core.hpp"
#include "adslate/harness.hpp"
#include "adslate/random.hpp"

namespace testing {

inline int pick(adslate::Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(adslate::uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

inline adslate::Metric any_metric(int m, adslate::Rng& rng) {
  if (adslate::uniform_index(rng, 2) == 0) return adslate::gen_euclidean(m, 1.0, rng).metric;
  return adslate::gen_random_metric(m, rng);
}

/// Metric from an explicit upper triangle, row by row.
inline adslate::Metric metric_from_rows(std::vector<std::vector<double>> rows) { return adslate::Metric(std::move(rows)); }

inline adslate::Metric line_metric(const std::vector<double>& xs) {
  const int m = static_cast<int>(xs.size());
  std::vector<std::vector<double>> d(m, std::vector<double>(m, 0.0));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) d[a][b] = std::abs(xs[a] - xs[b]);
  return adslate::Metric(std::move(d));
}

inline adslate::Metric two_point(double d) { return adslate::Metric({{0.0, d}, {d, 0.0}}); }

inline bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace testing
