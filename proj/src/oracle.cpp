#include "adslate/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace adslate {

namespace {

// Hungarian method on a rows x cols cost matrix with rows <= cols; returns
// the column assigned to each row, minimizing total cost.
std::vector<int> hungarian_min(const std::vector<std::vector<double>>& cost, int rows, int cols) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<int> p(cols + 1, 0), way(cols + 1, 0);
  for (int i = 1; i <= rows; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<char> used(cols + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col_of(rows, -1);
  for (int j = 1; j <= cols; ++j)
    if (p[j] != 0) col_of[p[j] - 1] = j - 1;
  return col_of;
}

void check_rect(const std::vector<std::vector<double>>& w, std::size_t& rows, std::size_t& cols) {
  rows = w.size();
  cols = rows ? w[0].size() : 0;
  for (const auto& r : w) {
    if (r.size() != cols) throw std::invalid_argument("weight table must be rectangular");
    for (double x : r)
      if (!std::isfinite(x)) throw std::invalid_argument("weights must be finite");
  }
}

// Lexicographic order on the sorted element lists of two bitmasks.
bool lex_less(std::uint64_t a, std::uint64_t b) {
  if (a == b) return false;
  const std::uint64_t diff = a ^ b;
  const int bit = std::countr_zero(diff);
  const std::uint64_t above = ~((std::uint64_t{2} << bit) - 1);
  const bool a_has = a >> bit & 1u;
  const std::uint64_t other = a_has ? b : a;
  // The set holding the first differing element is smaller unless the other set ends there.
  const bool holder_smaller = (other & above) != 0;
  return a_has == holder_smaller;
}

struct MaskBest {
  double value = -std::numeric_limits<double>::infinity();
  std::uint64_t mask = 0;
  bool valid = false;

  void offer(double v, std::uint64_t m) {
    if (!valid || v > value || (v == value && lex_less(m, mask))) {
      value = v;
      mask = m;
      valid = true;
    }
  }
  void merge(const MaskBest& o) {
    if (o.valid) offer(o.value, o.mask);
  }
};

// Argmax of score(mask) over [0, 2^bits), skipping masks scored -inf.
template <class Score>
MaskBest mask_argmax(int bits, bool parallel, std::int64_t& explored, Score&& score) {
  const std::int64_t total = std::int64_t{1} << bits;
  constexpr std::int64_t chunk = 4096;
  const std::int64_t chunks = (total + chunk - 1) / chunk;
  std::vector<MaskBest> partial(chunks);
  std::vector<std::int64_t> counts(chunks, 0);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t end = std::min(total, (c + 1) * chunk);
    for (std::int64_t mask = c * chunk; mask < end; ++mask) {
      const double s = score(static_cast<std::uint64_t>(mask));
      if (s == -std::numeric_limits<double>::infinity()) continue;
      ++counts[c];
      partial[c].offer(s, static_cast<std::uint64_t>(mask));
    }
  }
  MaskBest best;
  explored = 0;
  for (std::int64_t c = 0; c < chunks; ++c) {
    best.merge(partial[c]);
    explored += counts[c];
  }
  return best;
}

std::vector<int> mask_members(std::uint64_t mask) {
  std::vector<int> out;
  for (int b = 0; mask; ++b, mask >>= 1)
    if (mask & 1u) out.push_back(b);
  return out;
}

void check_cap(int size, const OracleOptions& options, const char* what) {
  if (size > options.max_points || size > 62)
    throw OracleCapExceeded(std::string(what) + " has " + std::to_string(size) + " elements, cap is " +
                            std::to_string(std::min(options.max_points, 62)));
}

struct SubsetValue {
  double value;
  std::vector<int> column_of;
};

SubsetValue subset_assignment(const Instance& inst, const std::vector<int>& slots) {
  const int rows = static_cast<int>(slots.size());
  std::vector<std::vector<double>> cost(rows, std::vector<double>(inst.n()));
  for (int r = 0; r < rows; ++r) {
    const double delta = discount(inst.model(), slots[r], slots, inst.metric());
    for (int i = 0; i < inst.n(); ++i) cost[r][i] = -inst.value(i, slots[r]) * delta;
  }
  SubsetValue out{0.0, hungarian_min(cost, rows, inst.n())};
  for (int r = 0; r < rows; ++r) out.value -= cost[r][out.column_of[r]];
  return out;
}

AllocationOracleResult allocation_impl(const Instance& inst, const OracleOptions& options, bool parallel) {
  check_cap(inst.m(), options, "slot set");
  AllocationOracleResult res;
  const auto best = mask_argmax(inst.m(), parallel, res.explored, [&](std::uint64_t mask) {
    if (std::popcount(mask) > inst.n()) return -std::numeric_limits<double>::infinity();
    if (mask == 0) return 0.0;
    return subset_assignment(inst, mask_members(mask)).value;
  });
  const auto slots = mask_members(best.mask);
  if (!slots.empty()) {
    const auto sv = subset_assignment(inst, slots);
    for (std::size_t r = 0; r < slots.size(); ++r) res.best.pairs.emplace_back(sv.column_of[r], slots[r]);
    std::sort(res.best.pairs.begin(), res.best.pairs.end());
  }
  res.value = social_welfare(res.best, inst);
  return res;
}

// Maximum-weight conflict-free subset of at most `budget` items, by depth-first
// search with a remaining-weight bound. Ties go to the lexicographically
// smallest index list.
SelectionOracleResult packing_search(const std::vector<double>& weight, const std::vector<char>& conflict,
                                     int budget) {
  const int n = static_cast<int>(weight.size());
  std::vector<double> suffix(n + 1, 0.0);
  for (int i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + std::max(0.0, weight[i]);

  SelectionOracleResult res;
  bool have = false;
  std::vector<int> current;
  auto lex_smaller = [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  auto rec = [&](auto&& self, int idx, double value) -> void {
    ++res.explored;
    if (have && value + suffix[idx] < res.best.value) return;
    if (idx == n || static_cast<int>(current.size()) == budget) {
      if (!have || value > res.best.value || (value == res.best.value && lex_smaller(current, res.best.chosen))) {
        res.best.chosen = current;
        res.best.value = value;
        have = true;
      }
      return;
    }
    bool ok = weight[idx] >= 0.0;
    for (int c : current)
      if (conflict[static_cast<std::size_t>(idx) * n + c]) {
        ok = false;
        break;
      }
    if (ok) {
      current.push_back(idx);
      self(self, idx + 1, value + weight[idx]);
      current.pop_back();
    }
    self(self, idx + 1, value);
  };
  rec(rec, 0, 0.0);
  return res;
}

}  // namespace

AssignmentResult max_weight_row_assignment(const std::vector<std::vector<double>>& weights) {
  std::size_t rows, cols;
  check_rect(weights, rows, cols);
  if (rows > cols) throw std::invalid_argument("row assignment needs rows <= columns");
  AssignmentResult res;
  if (rows == 0) return res;
  std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) cost[r][c] = -weights[r][c];
  const auto col_of = hungarian_min(cost, static_cast<int>(rows), static_cast<int>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    res.pairs.emplace_back(static_cast<int>(r), col_of[r]);
    res.value += weights[r][col_of[r]];
  }
  return res;
}

AssignmentResult max_weight_matching(const std::vector<std::vector<double>>& weights) {
  std::size_t rows, cols;
  check_rect(weights, rows, cols);
  const std::size_t side = std::max(rows, cols);
  std::vector<std::vector<double>> square(side, std::vector<double>(side, 0.0));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) square[r][c] = std::max(0.0, weights[r][c]);
  const auto full = max_weight_row_assignment(square);
  AssignmentResult res;
  for (auto [r, c] : full.pairs) {
    if (static_cast<std::size_t>(r) >= rows || static_cast<std::size_t>(c) >= cols) continue;
    if (!(weights[r][c] > 0.0)) continue;
    res.pairs.emplace_back(r, c);
    res.value += weights[r][c];
  }
  return res;
}

AllocationOracleResult optimal_allocation(const Instance& instance, const OracleOptions& options) {
  return allocation_impl(instance, options, options.parallel);
}

AllocationOracleResult optimal_allocation_serial(const Instance& instance, const OracleOptions& options) {
  return allocation_impl(instance, options, false);
}

SelectionOracleResult optimal_gpds(const GpdsInstance& gpds, GpdsConstraint constraint, const OracleOptions& options) {
  gpds.validate();
  check_cap(gpds.size(), options, "disk set");
  const int n = gpds.size();
  const auto owner = gpds.group_of();
  std::vector<double> weight(n);
  std::vector<char> conflict(static_cast<std::size_t>(n) * n, 0);
  for (int a = 0; a < n; ++a) {
    weight[a] = gpds.disks[a].weight;
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      bool clash = owner[a] == owner[b];
      if (constraint == GpdsConstraint::CenterFree) {
        clash = clash || gpds.covers(a, gpds.disks[b].center) || gpds.covers(b, gpds.disks[a].center);
      } else {
        for (int p = 0; p < gpds.metric.size() && !clash; ++p) clash = gpds.covers(a, p) && gpds.covers(b, p);
      }
      conflict[static_cast<std::size_t>(a) * n + b] = clash;
    }
  }
  auto res = packing_search(weight, conflict, n);
  res.best.value = selection_value(gpds, res.best.chosen);
  return res;
}

SelectionOracleResult optimal_wds(const WdsInstance& wds, const std::vector<char>& allowed,
                                  const OracleOptions& options) {
  std::vector<int> index;
  for (int d = 0; d < wds.size(); ++d)
    if (allowed.empty() || allowed[d]) index.push_back(d);
  check_cap(static_cast<int>(index.size()), options, "disk set");
  const int n = static_cast<int>(index.size());
  std::vector<double> weight(n);
  std::vector<char> conflict(static_cast<std::size_t>(n) * n, 0);
  for (int a = 0; a < n; ++a) {
    weight[a] = wds.disks[index[a]].weight;
    for (int b = 0; b < n; ++b)
      if (a != b) conflict[static_cast<std::size_t>(a) * n + b] = wds.conflict(index[a], index[b]);
  }
  auto res = packing_search(weight, conflict, std::max(0, wds.budget));
  for (int& c : res.best.chosen) c = index[c];
  res.best.value = wds_value(wds, res.best.chosen);
  return res;
}

namespace {

VertexSetResult msed_impl(const Graph& graph, const OracleOptions& options, bool parallel) {
  check_cap(graph.vertices(), options, "vertex set");
  VertexSetResult res;
  const int nv = graph.vertices();
  const auto best = mask_argmax(nv, parallel, res.explored, [&](std::uint64_t mask) {
    double rho = 0.0;
    for (int v = 0; v < nv; ++v)
      if (mask >> v & 1u) rho += std::ldexp(1.0, -std::popcount(graph.neighbours(v) & mask));
    return rho;
  });
  res.best = mask_members(best.mask);
  res.value = msed_objective(graph, res.best);
  return res;
}

}  // namespace

VertexSetResult optimal_msed(const Graph& graph, const OracleOptions& options) {
  return msed_impl(graph, options, options.parallel);
}

VertexSetResult optimal_msed_serial(const Graph& graph, const OracleOptions& options) {
  return msed_impl(graph, options, false);
}

VertexSetResult maximum_independent_set(const Graph& graph, const OracleOptions& options) {
  check_cap(graph.vertices(), options, "vertex set");
  VertexSetResult res;
  const int nv = graph.vertices();
  const auto best = mask_argmax(nv, options.parallel, res.explored, [&](std::uint64_t mask) {
    for (int v = 0; v < nv; ++v)
      if ((mask >> v & 1u) && (graph.neighbours(v) & mask)) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(std::popcount(mask));
  });
  res.best = mask_members(best.mask);
  res.value = static_cast<double>(res.best.size());
  return res;
}

}  // namespace adslate
