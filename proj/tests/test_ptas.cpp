#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "adslate/oracle.hpp"
#include "adslate/ptas.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace adslate;
using testing::pick;

namespace {

Disk2D free_disk(double x, double y, double r, double w) {
  Disk2D d;
  d.center = {x, y};
  d.radius = r;
  d.weight = w;
  return d;
}

struct UnitCase {
  std::vector<Point2> points;
  Instance instance;
};

UnitCase unit_case(int n, int m, Rng& rng) {
  auto layout = gen_euclidean(m, 1.0, rng);
  return {layout.points, gen_unit_instance(n, layout.metric, rng)};
}

}  // namespace

TEST_CASE("grid parameter") {
  CHECK(grid_k(0.5) == 2);
  CHECK(grid_k(1.0 / 3.0) == 3);
  CHECK(grid_k(0.3) == 3);
  CHECK(grid_k(0.1) == 10);
  CHECK_THROWS_AS(grid_k(0.6), std::invalid_argument);
  CHECK_THROWS_AS(grid_k(0.0), std::invalid_argument);
  CHECK(boundary_set_bound(2) == doctest::Approx(40000.0 / std::numbers::pi + 20.0));
  CHECK(local_set_bound(3) == doctest::Approx(144.0 / std::numbers::pi));
}

TEST_CASE("disk reduction thresholds") {
  const std::vector<Point2> pts{{0.0, 0.0}, {1.0, 0.0}, {0.6, 0.0}};
  const Metric metric = normalized_metric(pts);
  const Instance inst({{1.0, 0.5, 0.8}, {1.0, 0.5, 0.8}}, metric, DiscountModel::NearestNeighbor);
  const auto wds = reduce_nn_to_wds(inst, pts, 0.1);
  CHECK(wds.size() == 6);
  CHECK(wds.budget == 2);
  for (const auto& d : wds.disks) {
    CHECK(d.radius == metric(d.site, d.partner));
    CHECK(d.weight == doctest::Approx(inst.value(0, d.site) * d.radius));
  }

  const std::vector<Point2> tight{{0.0, 0.0}, {1.0, 0.0}, {0.001, 0.0}};
  const Instance t({{1.0, 1.0, 1.0}}, normalized_metric(tight), DiscountModel::NearestNeighbor);
  const auto w2 = reduce_nn_to_wds(t, tight, 0.1);
  CHECK(w2.size() == 4);  // 0.001 < 0.1 / 3 drops both orientations
  for (const auto& d : w2.disks) CHECK(d.radius >= 0.1 / 3);

  const Instance mixed({{1.0, 1.0, 1.0}, {1.0, 0.5, 1.0}}, metric, DiscountModel::NearestNeighbor);
  CHECK_THROWS_AS(reduce_nn_to_wds(mixed, pts, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(reduce_nn_to_wds(inst, pts, 0.7), std::invalid_argument);
}

TEST_CASE("disk selection examples") {
  WdsInstance far;
  // both centers sit mid-cell for offset (0, 0), so no shift removes them
  far.disks = {free_disk(0.2, 0.2, 0.1, 1.0), free_disk(4.2, 4.2, 0.1, 2.0)};
  far.budget = 2;
  auto r = ptas_wds(far, 0.5);
  CHECK(r.selection.value == 3.0);

  WdsInstance overlap;
  overlap.disks = {free_disk(0.0, 0.0, 1.0, 1.0), free_disk(0.5, 0.0, 1.0, 2.0)};
  overlap.budget = 2;
  r = ptas_wds(overlap, 0.5);
  CHECK(r.selection.chosen == std::vector<int>{1});

  far.budget = 0;
  CHECK(ptas_wds(far, 0.5).selection.chosen.empty());

  // tangent centers are not covered under strict semantics
  WdsInstance tangent;
  tangent.disks = {free_disk(0.0, 0.0, 1.0, 1.0), free_disk(1.0, 0.0, 1.0, 1.0)};
  tangent.budget = 2;
  CHECK(wds_infeasibility(tangent, {0, 1}).empty());
}

TEST_CASE("grid hierarchy structure") {
  Rng rng = make_stream(61, 0);
  for (int rep = 0; rep < 60; ++rep) {
    const int m = pick(rng, 2, 6);
    const auto c = unit_case(pick(rng, 1, 4), m, rng);
    const double eps = rep % 2 ? 0.5 : 1.0 / 3.0;
    const auto wds = reduce_nn_to_wds(c.instance, c.points, eps);
    const int k = grid_k(eps);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        const auto g = build_grid_hierarchy(wds, eps, a, b);
        for (std::size_t ci = 1; ci < g.cells.size(); ++ci) {
          const auto& cell = g.cells[ci];
          const auto& parent = g.cells[cell.parent];
          CHECK(cell.level == parent.level + 1);
          CHECK(cell.x0 >= parent.x0 - 1e-12);
          CHECK(cell.x1 <= parent.x1 + 1e-12);
          CHECK(cell.y0 >= parent.y0 - 1e-12);
          CHECK(cell.y1 <= parent.y1 + 1e-12);
        }
        for (int d = 0; d < wds.size(); ++d) {
          const double diam = 2 * wds.disks[d].radius * g.scale;
          const int l = g.level_of[d];
          CHECK(diam <= g.unit(l) * (1 + 1e-12));
          CHECK(diam > g.unit(l + 1) * (1 - 1e-12));
          if (!g.survives[d]) continue;
          // a survivor lies inside its cell, tangency allowed
          const auto& cell = g.cells[g.cell_of[d]];
          CHECK(cell.level == l);
          const double x = wds.disks[d].center.x * g.scale, y = wds.disks[d].center.y * g.scale;
          const double r = wds.disks[d].radius * g.scale;
          CHECK(x - cell.x0 >= r - 1e-12);
          CHECK(cell.x1 - x >= r - 1e-12);
          CHECK(y - cell.y0 >= r - 1e-12);
          CHECK(cell.y1 - y >= r - 1e-12);
        }
      }
  }
}

TEST_CASE("a lone disk survives some offset") {
  Rng rng = make_stream(62, 0);
  for (int rep = 0; rep < 100; ++rep) {
    WdsInstance w;
    w.disks = {free_disk(uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, 0.01, 1.0), 1.0)};
    w.budget = 1;
    bool any = false;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) any = any || build_grid_hierarchy(w, 0.5, a, b).survives[0];
    CHECK(any);
    CHECK(ptas_wds(w, 0.5).selection.value == 1.0);
  }
}

TEST_CASE("property: the DP is exact on surviving disks") {
  Rng rng = make_stream(63, 0);
  int compared = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const int m = pick(rng, 2, 4);
    const auto c = unit_case(pick(rng, 1, 4), m, rng);
    const double eps = rep % 2 ? 0.5 : 1.0 / 3.0;
    const auto wds = reduce_nn_to_wds(c.instance, c.points, eps);
    const int k = grid_k(eps);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        const auto g = build_grid_hierarchy(wds, eps, a, b);
        const auto dp = ptas_dp(wds, g);
        const auto best = optimal_wds(wds, g.survives);
        CHECK(dp.value == doctest::Approx(best.best.value).epsilon(1e-12));
        CHECK(wds_infeasibility(wds, dp.chosen).empty());
        CHECK(static_cast<int>(dp.chosen.size()) <= wds.budget);
        for (int d : dp.chosen) CHECK(g.survives[d]);
        ++compared;
      }
  }
  CHECK(compared > 0);
}

TEST_CASE("property: DP on free disks matches the restricted oracle") {
  Rng rng = make_stream(64, 0);
  for (int rep = 0; rep < 40; ++rep) {
    WdsInstance w;
    const int n = pick(rng, 1, 9);
    for (int d = 0; d < n; ++d)
      w.disks.push_back(free_disk(uniform(rng, 0, 2), uniform(rng, 0, 2), uniform(rng, 0.05, 0.8), uniform01(rng)));
    w.budget = pick(rng, 0, 4);
    const auto g = build_grid_hierarchy(w, 0.5, rep % 2, (rep / 2) % 2);
    const auto dp = ptas_dp(w, g);
    CHECK(dp.value == doctest::Approx(optimal_wds(w, g.survives).best.value).epsilon(1e-12));
  }
}

TEST_CASE("property: offsets retain most of the optimum and outputs stay feasible") {
  Rng rng = make_stream(65, 0);
  for (int rep = 0; rep < 40; ++rep) {
    const auto c = unit_case(pick(rng, 1, 5), pick(rng, 2, 4), rng);
    const double eps = rep % 2 ? 0.5 : 1.0 / 3.0;
    const auto wds = reduce_nn_to_wds(c.instance, c.points, eps);
    const auto res = ptas_wds(wds, eps);
    const double full = optimal_wds(wds).best.value;
    CHECK(res.selection.value >= (1 - res.eps) * (1 - res.eps) * full - 1e-12);
    CHECK(wds_infeasibility(wds, res.selection.chosen).empty());
    for (int a : res.selection.chosen)
      for (int b : res.selection.chosen)
        if (a < b) {
          // halved disks are disjoint
          const double d = euclidean(wds.disks[a].center, wds.disks[b].center);
          CHECK(d >= 0.5 * (wds.disks[a].radius + wds.disks[b].radius) - 1e-12);
        }
    const auto mt = wds_selection_to_matching(res.selection.chosen, wds, c.instance);
    CHECK(social_welfare(mt, c.instance) >= res.selection.value - 1e-12);
  }
}

TEST_CASE("disk optimum covers a (1 - eps) share of multi-slot optima") {
  Rng rng = make_stream(66, 0);
  int checked = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const auto c = unit_case(pick(rng, 2, 5), pick(rng, 2, 5), rng);
    const auto opt = optimal_allocation(c.instance);
    if (opt.best.size() < 2) continue;
    const double eps = 1.0 / 3.0;
    const auto wds = reduce_nn_to_wds(c.instance, c.points, eps);
    CHECK(optimal_wds(wds).best.value >= (1 - eps) * opt.value - 1e-12);
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("a single occupied slot is outside the disk reduction's reach") {
  // one advertiser: the heaviest disk sits on an end slot (0.6 * 1), while the
  // optimum is the middle slot alone with discount 1
  const std::vector<Point2> pts{{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.0}};
  const Instance inst({{0.6, 0.1, 1.0}}, normalized_metric(pts), DiscountModel::NearestNeighbor);
  const auto wds = reduce_nn_to_wds(inst, pts, 0.5);
  CHECK(optimal_wds(wds).best.value == doctest::Approx(0.6));
  const auto a = ptas_allocate(inst, pts, 0.5);
  CHECK(a.single_slot);
  CHECK(a.welfare == 1.0);
  CHECK(a.matching.pairs == std::vector<std::pair<int, int>>{{0, 2}});
}

TEST_CASE("allocation examples") {
  const std::vector<Point2> one{{0.3, 0.3}};
  const Instance single({{0.8}}, Metric::single_point(), DiscountModel::NearestNeighbor);
  CHECK(ptas_allocate(single, one, 0.5).welfare == 0.8);

  const std::vector<Point2> square{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  const Instance sq(std::vector<std::vector<double>>(4, std::vector<double>(4, 1.0)), normalized_metric(square),
                    DiscountModel::NearestNeighbor);
  const double opt = optimal_allocation(sq).value;
  CHECK(opt == doctest::Approx(4.0 / std::sqrt(2.0)));
  const auto a = ptas_allocate(sq, square, 1.0 / 3.0);
  CHECK(a.welfare >= std::pow(2.0 / 3.0, 3) * opt);
}

TEST_CASE("property: allocation ratio on random layouts") {
  Rng rng = make_stream(67, 0);
  for (int rep = 0; rep < 40; ++rep) {
    const int m = pick(rng, 1, 6);
    const auto c = unit_case(pick(rng, 1, m + 1), m, rng);
    const double eps = rep % 2 ? 0.5 : 1.0 / 3.0;
    const auto a = ptas_allocate(c.instance, c.points, eps);
    CHECK(a.welfare >= std::pow(1 - eps, 3) * optimal_allocation(c.instance).value - 1e-12);
    CHECK(a.matching.feasible(c.instance.n(), c.instance.m()));
    CHECK(a.welfare == social_welfare(a.matching, c.instance));
  }
}

TEST_CASE("parallel and serial offsets agree; the work cap is enforced") {
  Rng rng = make_stream(68, 0);
  const auto c = unit_case(4, 5, rng);
  PtasOptions serial;
  serial.parallel = false;
  const auto p = ptas_allocate(c.instance, c.points, 1.0 / 3.0);
  const auto s = ptas_allocate(c.instance, c.points, 1.0 / 3.0, serial);
  CHECK(p.welfare == s.welfare);
  CHECK(p.dp.alpha == s.dp.alpha);
  CHECK(p.dp.beta == s.dp.beta);
  REQUIRE(p.dp.offsets.size() == s.dp.offsets.size());
  for (std::size_t k = 0; k < p.dp.offsets.size(); ++k) CHECK(p.dp.offsets[k].value == s.dp.offsets[k].value);

  PtasOptions tiny;
  tiny.work_cap = 1;
  CHECK_THROWS_AS(ptas_allocate(c.instance, c.points, 1.0 / 3.0, tiny), PtasWorkLimit);
}
