#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "adslate/oracle.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace adslate;
using testing::pick;

namespace {

// Every partial injective advertiser -> slot map, scored directly.
double brute_force_welfare(const Instance& inst) {
  double best = 0.0;
  std::vector<int> choice(inst.n(), -1);
  std::function<void(int, std::vector<char>&)> rec = [&](int i, std::vector<char>& used) {
    if (i == inst.n()) {
      Matching mt;
      for (int a = 0; a < inst.n(); ++a)
        if (choice[a] >= 0) mt.pairs.emplace_back(a, choice[a]);
      best = std::max(best, social_welfare(mt, inst));
      return;
    }
    choice[i] = -1;
    rec(i + 1, used);
    for (int j = 0; j < inst.m(); ++j)
      if (!used[j]) {
        used[j] = 1;
        choice[i] = j;
        rec(i + 1, used);
        used[j] = 0;
      }
    choice[i] = -1;
  };
  std::vector<char> used(inst.m(), 0);
  rec(0, used);
  return best;
}

double permutation_assignment(const std::vector<std::vector<double>>& w) {
  const int n = static_cast<int>(w.size()), m = static_cast<int>(w[0].size());
  std::vector<int> cols(m);
  std::iota(cols.begin(), cols.end(), 0);
  double best = -1e300;
  do {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += w[i][cols[i]];
    best = std::max(best, v);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

}  // namespace

TEST_CASE("assignment examples") {
  CHECK(max_weight_matching({{5.0}}).value == 5.0);
  CHECK(max_weight_matching({{3.0, 1.0}, {1.0, 3.0}}).value == 6.0);
  const auto anti = max_weight_matching({{3.0, 3.0}, {3.0, 1.0}});
  CHECK(anti.value == 6.0);
  REQUIRE(anti.pairs.size() == 2);
  CHECK(std::find(anti.pairs.begin(), anti.pairs.end(), std::pair{0, 1}) != anti.pairs.end());
  CHECK(std::find(anti.pairs.begin(), anti.pairs.end(), std::pair{1, 0}) != anti.pairs.end());
  // non-positive weights are never used
  const auto neg = max_weight_matching({{-1.0, 0.0}, {2.0, -3.0}});
  CHECK(neg.value == 2.0);
  CHECK(neg.pairs.size() == 1);
}

TEST_CASE("property: row assignment matches permutation enumeration") {
  Rng rng = make_stream(21, 0);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = pick(rng, 1, 4), m = pick(rng, n, 5);
    std::vector<std::vector<double>> w(n, std::vector<double>(m));
    for (auto& row : w)
      for (double& x : row) x = uniform(rng, -1.0, 1.0);
    const auto r = max_weight_row_assignment(w);
    CHECK(r.pairs.size() == static_cast<std::size_t>(n));
    CHECK(r.value == doctest::Approx(permutation_assignment(w)).epsilon(1e-12));
  }
}

TEST_CASE("optimal allocation examples") {
  const Instance far({{1.0, 1.0}, {1.0, 1.0}}, testing::two_point(0.6), DiscountModel::NearestNeighbor);
  const auto a = optimal_allocation(far);
  CHECK(a.value == doctest::Approx(1.2));
  CHECK(a.best.size() == 2);

  const Instance near({{1.0, 1.0}, {1.0, 1.0}}, testing::two_point(0.1), DiscountModel::NearestNeighbor);
  const auto b = optimal_allocation(near);
  CHECK(b.value == doctest::Approx(1.0));
  CHECK(b.best.size() == 1);
  // ties go to the lexicographically smallest slot set
  CHECK(b.best.occupied_slots() == std::vector<int>{0});

  const Instance one({{7.0}}, Metric::single_point(), DiscountModel::NearestNeighbor);
  CHECK(optimal_allocation(one).value == 7.0);

  const Instance none(0, 2, {}, testing::two_point(0.5), DiscountModel::NearestNeighbor);
  CHECK(optimal_allocation(none).value == 0.0);
}

TEST_CASE("property: optimal allocation agrees with brute force over matchings") {
  Rng rng = make_stream(22, 0);
  for (int rep = 0; rep < 150; ++rep) {
    const int n = pick(rng, 1, 3), m = pick(rng, 1, 4);
    const auto model = rep % 2 ? DiscountModel::ProductDistance : DiscountModel::NearestNeighbor;
    std::vector<double> v(static_cast<std::size_t>(n) * m);
    for (double& x : v) x = uniform01(rng);
    const Instance inst(n, m, v, testing::any_metric(m, rng), model);
    const auto r = optimal_allocation(inst);
    CHECK(r.value == doctest::Approx(brute_force_welfare(inst)).epsilon(1e-12));
    CHECK(r.value == social_welfare(r.best, inst));
    CHECK(r.best.feasible(n, m));
  }
}

TEST_CASE("parallel and serial oracles agree exactly") {
  Rng rng = make_stream(23, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = pick(rng, 1, 6), m = pick(rng, 1, 8);
    const Instance inst = gen_nn_instance(n, m, testing::any_metric(m, rng), rng);
    const auto p = optimal_allocation(inst), s = optimal_allocation_serial(inst);
    CHECK(p.value == s.value);
    CHECK(p.best.occupied_slots() == s.best.occupied_slots());
    CHECK(p.explored == s.explored);
  }
}

TEST_CASE("oracle caps are enforced") {
  Rng rng = make_stream(24, 0);
  const Instance inst = gen_nn_instance(2, 6, gen_random_metric(6, rng), rng);
  OracleOptions tiny;
  tiny.max_points = 5;
  CHECK_THROWS_AS(optimal_allocation(inst, tiny), OracleCapExceeded);
  const Graph g(6, {});
  CHECK_THROWS_AS(optimal_msed(g, tiny), OracleCapExceeded);
}

TEST_CASE("grouped selection oracle examples") {
  GpdsInstance g;
  g.metric = testing::two_point(0.5);
  g.disks = {{0, 0.1, 4.0}};
  g.groups = {{0}};
  auto r = optimal_gpds(g, GpdsConstraint::PointPacking);
  CHECK(r.best.chosen == std::vector<int>{0});
  CHECK(r.best.value == 4.0);

  g.disks = {{0, 0.1, 3.0}, {1, 0.1, 5.0}};
  g.groups = {{0, 1}};
  CHECK(optimal_gpds(g, GpdsConstraint::CenterFree).best.value == 5.0);

  g.disks = {{0, 0.6, 3.0}, {1, 0.6, 5.0}};
  g.groups = {{0}, {1}};
  CHECK(optimal_gpds(g, GpdsConstraint::CenterFree).best.value == 5.0);
  CHECK(optimal_gpds(g, GpdsConstraint::PointPacking).best.value == 5.0);

  // constraint I is stricter: disjoint centers but a shared covered point
  GpdsInstance h;
  h.metric = testing::line_metric({0.0, 0.5, 1.0});
  h.disks = {{0, 0.6, 1.0}, {2, 0.6, 1.0}};
  h.groups = {{0}, {1}};
  CHECK(optimal_gpds(h, GpdsConstraint::CenterFree).best.value == 2.0);
  CHECK(optimal_gpds(h, GpdsConstraint::PointPacking).best.value == 1.0);
}

TEST_CASE("exponential-degree oracle examples") {
  const auto empty = optimal_msed(Graph(3, {}));
  CHECK(empty.value == 3.0);
  CHECK(empty.best == std::vector<int>{0, 1, 2});
  CHECK(optimal_msed(Graph(3, {{0, 1}, {1, 2}, {0, 2}})).value == 1.0);
  CHECK(optimal_msed(Graph(2, {{0, 1}})).value == 1.0);
  CHECK(maximum_independent_set(Graph(4, {{0, 1}, {1, 2}, {2, 3}})).best.size() == 2);
}

TEST_CASE("property: exponential-degree optimum dominates the independence number") {
  Rng rng = make_stream(25, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const Graph g = gen_graph(pick(rng, 1, 12), uniform01(rng), rng);
    const auto rho = optimal_msed(g), mis = maximum_independent_set(g);
    CHECK(rho.value >= static_cast<double>(mis.best.size()));
    CHECK(optimal_msed_serial(g).value == rho.value);
  }
}
