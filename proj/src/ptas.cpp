#include "adslate/ptas.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <tuple>

namespace adslate {

double euclidean(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool WdsInstance::covers_center(int a, int b) const {
  const auto& da = disks[a];
  const auto& db = disks[b];
  const double d = (da.site >= 0 && db.site >= 0 && sites.size() > 0) ? sites(da.site, db.site)
                                                                      : euclidean(da.center, db.center);
  return d < da.radius;
}

std::string wds_infeasibility(const WdsInstance& wds, const std::vector<int>& chosen) {
  if (static_cast<int>(chosen.size()) > wds.budget)
    return "selects " + std::to_string(chosen.size()) + " disks, budget " + std::to_string(wds.budget);
  for (int a : chosen) {
    if (a < 0 || a >= wds.size()) return "unknown disk " + std::to_string(a);
    for (int b : chosen) {
      if (a == b) continue;
      if (wds.covers_center(a, b))
        return "center of disk " + std::to_string(b) + " inside disk " + std::to_string(a);
    }
  }
  std::vector<int> sorted = chosen;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return "disk chosen twice";
  return {};
}

double wds_value(const WdsInstance& wds, const std::vector<int>& chosen) {
  double total = 0.0;
  for (int d : chosen) total += wds.disks[d].weight;
  return total;
}

int grid_k(double eps) {
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2]");
  return static_cast<int>(std::floor(1.0 / eps + 1e-9));
}

double boundary_set_bound(int k) { return 10000.0 * k * k / std::numbers::pi + 20.0; }
double local_set_bound(int k) { return 16.0 * k * k / std::numbers::pi; }

WdsInstance reduce_nn_to_wds(const Instance& instance, const std::vector<Point2>& points, double eps) {
  const int k = grid_k(eps);
  const double e = 1.0 / k;
  const int n = instance.n(), m = instance.m();
  if (static_cast<int>(points.size()) != m) throw std::invalid_argument("need one point per slot");
  if (instance.model() != DiscountModel::NearestNeighbor)
    throw std::invalid_argument("disk reduction requires the nearest-neighbour model");
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (instance.value(i, j) != instance.value(0, j))
        throw std::invalid_argument("disk reduction requires identical advertiser rows");

  double diam = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) diam = std::max(diam, euclidean(points[a], points[b]));
  const double inv = diam > 0.0 ? 1.0 / diam : 1.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (std::abs(instance.metric()(a, b) - inv * euclidean(points[a], points[b])) > 1e-9)
        throw std::invalid_argument("metric does not match the normalized point distances");

  WdsInstance wds;
  wds.budget = n;
  wds.sites = instance.metric();
  if (n == 0) return wds;
  for (int j = 0; j < m; ++j)
    for (int jp = 0; jp < m; ++jp) {
      if (j == jp) continue;
      const double d = instance.metric()(j, jp);
      if (d < e / m) continue;
      wds.disks.push_back({{points[j].x * inv, points[j].y * inv}, d, instance.value(0, j) * d, j, jp});
    }
  return wds;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

double GridHierarchy::unit(int level) const {
  double p = 1.0;
  for (int j = 0; j < level; ++j) p *= (k + 1);
  return 1.0 / p;
}

bool GridHierarchy::disk_touches_cell(const WdsInstance& wds, int disk, int cell) const {
  const auto& c = cells[cell];
  if (c.level < 0) return true;
  const auto& d = wds.disks[disk];
  const double x = d.center.x * scale, y = d.center.y * scale, r = d.radius * scale;
  const double dx = std::max({c.x0 - x, 0.0, x - c.x1});
  const double dy = std::max({c.y0 - y, 0.0, y - c.y1});
  return std::hypot(dx, dy) < r + 1e-12;
}

GridHierarchy build_grid_hierarchy(const WdsInstance& wds, double eps, int alpha, int beta) {
  GridHierarchy g;
  g.k = grid_k(eps);
  if (alpha < 0 || alpha >= g.k || beta < 0 || beta >= g.k) throw std::invalid_argument("offset out of range");
  g.alpha = alpha;
  g.beta = beta;
  const int n = wds.size();
  double rmax = 0.0;
  for (const auto& d : wds.disks) {
    if (!(d.radius > 0.0)) throw std::invalid_argument("disks must have positive radius");
    rmax = std::max(rmax, d.radius);
  }
  g.scale = rmax > 0.0 ? 0.5 / rmax : 1.0;
  g.level_of.assign(n, 0);
  g.survives.assign(n, 0);
  g.cell_of.assign(n, -1);

  GridCell root;
  root.x0 = root.y0 = -std::numeric_limits<double>::infinity();
  root.x1 = root.y1 = std::numeric_limits<double>::infinity();
  g.cells.push_back(root);

  const int K = g.k;
  for (int i = 0; i < n; ++i) {
    const double diam = 2.0 * wds.disks[i].radius * g.scale;
    int level = 0;
    while (diam <= g.unit(level + 1)) ++level;
    g.level_of[i] = level;
    g.deepest = std::max(g.deepest, level);
  }

  std::map<std::tuple<int, std::int64_t, std::int64_t>, int> index;
  auto cell_id = [&](int level, std::int64_t cx, std::int64_t cy) {
    auto [it, fresh] = index.try_emplace({level, cx, cy}, static_cast<int>(g.cells.size()));
    if (fresh) {
      GridCell c;
      c.level = level;
      c.cx = cx;
      c.cy = cy;
      const double s = g.unit(level);
      c.x0 = static_cast<double>(cx * K + alpha) * s;
      c.x1 = static_cast<double>((cx + 1) * K + alpha) * s;
      c.y0 = static_cast<double>(cy * K + beta) * s;
      c.y1 = static_cast<double>((cy + 1) * K + beta) * s;
      g.cells.push_back(c);
    }
    return it->second;
  };

  for (int i = 0; i < n; ++i) {
    const int level = g.level_of[i];
    const double s = g.unit(level);
    const double x = wds.disks[i].center.x * g.scale, y = wds.disks[i].center.y * g.scale;
    const double r = wds.disks[i].radius * g.scale;
    const std::int64_t cx = floor_div(static_cast<std::int64_t>(std::floor(x / s)) - alpha, K);
    const std::int64_t cy = floor_div(static_cast<std::int64_t>(std::floor(y / s)) - beta, K);
    const double x0 = static_cast<double>(cx * K + alpha) * s, x1 = static_cast<double>((cx + 1) * K + alpha) * s;
    const double y0 = static_cast<double>(cy * K + beta) * s, y1 = static_cast<double>((cy + 1) * K + beta) * s;
    if (x - x0 < r || x1 - x < r || y - y0 < r || y1 - y < r) continue;
    g.survives[i] = 1;

    int child = cell_id(level, cx, cy);
    g.cell_of[i] = child;
    g.cells[child].disks.push_back(i);
    std::int64_t px = cx, py = cy;
    for (int lv = level; lv >= 0; --lv) {
      int parent;
      if (lv == 0) {
        parent = 0;
      } else {
        px = floor_div(floor_div(px * K + alpha, K + 1) - alpha, K);
        py = floor_div(floor_div(py * K + beta, K + 1) - beta, K);
        parent = cell_id(lv - 1, px, py);
      }
      auto& ch = g.cells[child];
      if (ch.parent >= 0) break;  // chain above already linked
      ch.parent = parent;
      g.cells[parent].children.push_back(child);
      child = parent;
    }
  }
  for (auto& c : g.cells) std::sort(c.children.begin(), c.children.end());
  return g;
}

namespace {

using Vec = std::vector<double>;

class DpRun {
 public:
  DpRun(const WdsInstance& wds, const GridHierarchy& grid, const PtasOptions& options)
      : wds_(wds), grid_(grid), cap_(options.work_cap), q_(std::max(0, wds.budget)),
        boundary_bound_(boundary_set_bound(grid.k)), local_bound_(local_set_bound(grid.k)) {
    const int n = wds.size();
    conflict_.assign(static_cast<std::size_t>(n) * n, 0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b) conflict_[static_cast<std::size_t>(a) * n + b] = wds.conflict(a, b);
  }

  OffsetOutcome run() {
    OffsetOutcome out;
    out.alpha = grid_.alpha;
    out.beta = grid_.beta;
    for (char s : grid_.survives) out.survivors += s;
    const Vec& top = solve(0, {});
    out.value = top[q_];
    reconstruct(0, {}, q_, out.chosen);
    std::sort(out.chosen.begin(), out.chosen.end());
    if (auto why = wds_infeasibility(wds_, out.chosen); !why.empty())
      throw std::logic_error("dynamic program produced an infeasible selection: " + why);
    out.work = work_;
    out.table_entries = static_cast<std::int64_t>(memo_.size());
    out.max_boundary = max_boundary_;
    out.max_local = max_local_;
    return out;
  }

 private:
  bool conflicts(int a, int b) const { return conflict_[static_cast<std::size_t>(a) * wds_.size() + b] != 0; }

  void charge(std::int64_t units) {
    work_ += units;
    if (work_ > cap_) throw PtasWorkLimit("dynamic program exceeded the work cap");
  }

  // Level-local subsets S' compatible with S, in a fixed order.
  template <class Visit>
  void enumerate(int cell, const std::vector<int>& boundary, Visit&& visit) {
    std::vector<int> candidates;
    for (int d : grid_.cells[cell].disks) {
      bool ok = true;
      for (int s : boundary)
        if (conflicts(d, s)) {
          ok = false;
          break;
        }
      if (ok) candidates.push_back(d);
    }
    std::vector<int> current;
    auto rec = [&](auto&& self, std::size_t from) -> bool {
      charge(1);
      if (static_cast<double>(current.size()) > local_bound_)
        throw std::logic_error("local selection exceeds its cardinality bound");
      max_local_ = std::max(max_local_, static_cast<int>(current.size()));
      if (visit(current)) return true;
      if (static_cast<int>(current.size()) >= q_) return false;
      for (std::size_t t = from; t < candidates.size(); ++t) {
        const int d = candidates[t];
        bool ok = true;
        for (int c : current)
          if (conflicts(d, c)) {
            ok = false;
            break;
          }
        if (!ok) continue;
        current.push_back(d);
        if (self(self, t + 1)) return true;
        current.pop_back();
      }
      return false;
    };
    rec(rec, 0);
  }

  std::vector<int> restrict_to(int child, const std::vector<int>& boundary, const std::vector<int>& local) const {
    std::vector<int> out;
    for (int d : boundary)
      if (grid_.disk_touches_cell(wds_, d, child)) out.push_back(d);
    for (int d : local)
      if (grid_.disk_touches_cell(wds_, d, child)) out.push_back(d);
    std::sort(out.begin(), out.end());
    return out;
  }

  Vec maxplus(const Vec& a, const Vec& b) {
    charge(static_cast<std::int64_t>(q_ + 1) * (q_ + 1));
    Vec out(q_ + 1, 0.0);
    for (int q = 0; q <= q_; ++q) {
      double best = -std::numeric_limits<double>::infinity();
      for (int x = 0; x <= q; ++x) best = std::max(best, a[x] + b[q - x]);
      out[q] = best;
    }
    return out;
  }

  // Running knapsack over the children for a fixed S'; prefix[c] covers children [0, c).
  std::vector<Vec> children_prefix(int cell, const std::vector<int>& boundary, const std::vector<int>& local,
                                   std::vector<std::vector<int>>* child_sets) {
    std::vector<Vec> prefix{Vec(q_ + 1, 0.0)};
    for (int child : grid_.cells[cell].children) {
      auto set = restrict_to(child, boundary, local);
      const Vec& v = solve(child, set);
      prefix.push_back(maxplus(prefix.back(), v));
      if (child_sets) child_sets->push_back(std::move(set));
    }
    return prefix;
  }

  const Vec& solve(int cell, const std::vector<int>& boundary) {
    std::vector<int> key;
    key.reserve(boundary.size() + 1);
    key.push_back(cell);
    key.insert(key.end(), boundary.begin(), boundary.end());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    if (static_cast<double>(boundary.size()) > boundary_bound_)
      throw std::logic_error("boundary set exceeds its cardinality bound");
    max_boundary_ = std::max(max_boundary_, static_cast<int>(boundary.size()));

    Vec best(q_ + 1, 0.0);
    enumerate(cell, boundary, [&](const std::vector<int>& local) {
      const auto prefix = children_prefix(cell, boundary, local, nullptr);
      const Vec& comb = prefix.back();
      const double w = wds_value(wds_, local);
      const int used = static_cast<int>(local.size());
      for (int q = used; q <= q_; ++q) best[q] = std::max(best[q], w + comb[q - used]);
      return false;
    });
    return memo_.emplace(std::move(key), std::move(best)).first->second;
  }

  void reconstruct(int cell, const std::vector<int>& boundary, int q, std::vector<int>& out) {
    const double target = solve(cell, boundary)[q];
    bool found = false;
    enumerate(cell, boundary, [&](const std::vector<int>& local) {
      const int used = static_cast<int>(local.size());
      if (used > q) return false;
      std::vector<std::vector<int>> sets;
      const auto prefix = children_prefix(cell, boundary, local, &sets);
      const double w = wds_value(wds_, local);
      if (w + prefix.back()[q - used] != target) return false;
      out.insert(out.end(), local.begin(), local.end());
      const auto& kids = grid_.cells[cell].children;
      int rem = q - used;
      for (std::size_t c = kids.size(); c-- > 0;) {
        const Vec& v = solve(kids[c], sets[c]);
        int pick = -1;
        for (int b = 0; b <= rem; ++b)
          if (prefix[c][rem - b] + v[b] == prefix[c + 1][rem]) {
            pick = b;
            break;
          }
        if (pick < 0) throw std::logic_error("dynamic program reconstruction lost its split");
        reconstruct(kids[c], sets[c], pick, out);
        rem -= pick;
      }
      found = true;
      return true;
    });
    if (!found) throw std::logic_error("dynamic program reconstruction found no witness");
  }

  const WdsInstance& wds_;
  const GridHierarchy& grid_;
  std::int64_t cap_;
  int q_;
  double boundary_bound_, local_bound_;
  std::vector<char> conflict_;
  std::map<std::vector<int>, Vec> memo_;
  std::int64_t work_ = 0;
  int max_boundary_ = 0, max_local_ = 0;
};

}  // namespace

OffsetOutcome ptas_dp(const WdsInstance& wds, const GridHierarchy& grid, const PtasOptions& options) {
  return DpRun(wds, grid, options).run();
}

PtasResult ptas_wds(const WdsInstance& wds, double eps, const PtasOptions& options) {
  PtasResult res;
  res.k = grid_k(eps);
  res.eps = 1.0 / res.k;
  res.boundary_bound = boundary_set_bound(res.k);
  res.local_bound = local_set_bound(res.k);
  const int pairs = res.k * res.k;
  res.offsets.resize(pairs);
  std::vector<std::exception_ptr> errors(pairs);

#pragma omp parallel for schedule(dynamic, 1) if (options.parallel)
  for (int p = 0; p < pairs; ++p) {
    try {
      const auto grid = build_grid_hierarchy(wds, eps, p / res.k, p % res.k);
      res.offsets[p] = ptas_dp(wds, grid, options);
    } catch (...) {
      errors[p] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  int best = 0;
  for (int p = 1; p < pairs; ++p)
    if (res.offsets[p].value > res.offsets[best].value) best = p;
  res.alpha = res.offsets[best].alpha;
  res.beta = res.offsets[best].beta;
  res.selection.chosen = res.offsets[best].chosen;
  res.selection.value = wds_value(wds, res.selection.chosen);
  return res;
}

Matching wds_selection_to_matching(const std::vector<int>& chosen, const WdsInstance& wds, const Instance& instance) {
  if (auto why = wds_infeasibility(wds, chosen); !why.empty())
    throw std::invalid_argument("infeasible disk selection: " + why);
  if (static_cast<int>(chosen.size()) > instance.n()) throw std::invalid_argument("more disks than advertisers");
  Matching m;
  int next = 0;
  for (int d : chosen) {
    if (wds.disks[d].site < 0) throw std::invalid_argument("disk without a slot site");
    m.pairs.emplace_back(next++, wds.disks[d].site);
  }
  if (auto why = m.infeasibility(instance.n(), instance.m()); !why.empty())
    throw std::invalid_argument("disk selection maps to an infeasible matching: " + why);
  return m;
}

PtasAllocation ptas_allocate(const Instance& instance, const std::vector<Point2>& points, double eps,
                             const PtasOptions& options) {
  PtasAllocation out;
  const auto wds = reduce_nn_to_wds(instance, points, eps);
  out.dp = ptas_wds(wds, eps, options);
  out.matching = wds_selection_to_matching(out.dp.selection.chosen, wds, instance);
  out.welfare = social_welfare(out.matching, instance);

  // A lone slot has discount 1, which no disk weight reflects.
  if (instance.n() > 0 && instance.m() > 0) {
    int best = 0;
    for (int j = 1; j < instance.m(); ++j)
      if (instance.value(0, j) > instance.value(0, best)) best = j;
    if (instance.value(0, best) > out.welfare) {
      out.matching.pairs = {{0, best}};
      out.welfare = instance.value(0, best);
      out.single_slot = true;
    }
  }
  return out;
}

}  // namespace adslate
