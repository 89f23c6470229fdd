#include <algorithm>
#include <numeric>
#include <vector>

#include "adslate/core.hpp"
#include "adslate/oracle.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace adslate;
using testing::pick;

TEST_CASE("metric validation") {
  CHECK(validate_metric(testing::two_point(0.4)).ok());
  CHECK(validate_metric(Metric::single_point()).ok());

  const Metric bad({{0.0, 1.0, 0.3}, {1.0, 0.0, 0.2}, {0.3, 0.2, 0.0}});
  const auto report = validate_metric(bad);
  REQUIRE_FALSE(report.ok());
  bool found = false;
  for (const auto& v : report.violations)
    if (v.kind == ViolationKind::Triangle && v.a == 0 && v.b == 1 && v.c == 2) {
      found = true;
      CHECK(v.lhs == doctest::Approx(1.0));
      CHECK(v.rhs == doctest::Approx(0.5));
    }
  CHECK(found);

  CHECK_FALSE(validate_metric(Metric({{0.0, 0.5}, {0.4, 0.0}})).ok());
  CHECK_FALSE(validate_metric(Metric({{0.1, 0.5}, {0.5, 0.0}})).ok());
  CHECK_FALSE(validate_metric(Metric({{0.0, 1.5}, {1.5, 0.0}})).ok());
  CHECK_FALSE(validate_metric(Metric({{0.0, -0.1}, {-0.1, 0.0}})).ok());
  CHECK_THROWS_AS(Metric({{0.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("triangle slack absorbs rounding only") {
  const Metric m({{0.0, 0.5 + 5e-10, 0.25}, {0.5 + 5e-10, 0.0, 0.25}, {0.25, 0.25, 0.0}});
  CHECK(validate_metric(m).ok());
  CHECK_FALSE(validate_metric(m, 0.0).ok());
}

TEST_CASE("nearest-neighbour discount") {
  const Metric m({{0.0, 0.3, 0.7}, {0.3, 0.0, 0.5}, {0.7, 0.5, 0.0}});
  const std::vector<int> single{0}, pair{0, 2}, all{0, 1, 2};
  CHECK(nn_discount(0, single, m) == 1.0);
  CHECK(nn_discount(0, pair, m) == 0.7);
  CHECK(nn_discount(0, all, m) == 0.3);
  CHECK_THROWS_AS(nn_discount(1, pair, m), std::invalid_argument);
}

TEST_CASE("product-distance discount") {
  const Metric m({{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}});
  const std::vector<int> single{1}, all{0, 1, 2};
  CHECK(pd_discount(1, single, m) == 1.0);
  CHECK(pd_discount(0, all, m) == 0.25);
  const Metric zero({{0.0, 0.0, 0.5}, {0.0, 0.0, 0.5}, {0.5, 0.5, 0.0}});
  CHECK(pd_discount(2, all, zero) == 0.25);
  CHECK(pd_discount(0, all, zero) == 0.0);
  CHECK_THROWS_AS(pd_discount(0, single, m), std::invalid_argument);
}

TEST_CASE("nearest-neighbour discount is zero at distance zero") {
  const Metric zero({{0.0, 0.0}, {0.0, 0.0}});
  const Instance inst({{1.0, 1.0}, {1.0, 1.0}}, zero, DiscountModel::NearestNeighbor);
  Matching mt;
  mt.pairs = {{0, 0}, {1, 1}};
  CHECK(social_welfare(mt, inst) == 0.0);
}

TEST_CASE("social welfare examples") {
  const Instance nn({{1.0, 1.0}, {1.0, 1.0}}, testing::two_point(0.6), DiscountModel::NearestNeighbor);
  Matching empty;
  CHECK(social_welfare(empty, nn) == 0.0);
  Matching both;
  both.pairs = {{0, 0}, {1, 1}};
  CHECK(social_welfare(both, nn) == doctest::Approx(1.2));

  const Metric tri({{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}});
  const Instance pd(std::vector<std::vector<double>>(3, std::vector<double>(3, 1.0)), tri,
                    DiscountModel::ProductDistance);
  Matching three;
  three.pairs = {{0, 0}, {1, 1}, {2, 2}};
  CHECK(social_welfare(three, pd) == doctest::Approx(0.75));
  // every full assignment agrees: enumerate the permutations independently
  std::vector<int> perm{0, 1, 2};
  do {
    Matching p;
    for (int i = 0; i < 3; ++i) p.pairs.emplace_back(i, perm[i]);
    CHECK(social_welfare(p, pd) == doctest::Approx(0.75));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("infeasible matchings are rejected") {
  const Instance inst({{1.0, 1.0}, {1.0, 1.0}}, testing::two_point(0.6), DiscountModel::NearestNeighbor);
  Matching dup_slot;
  dup_slot.pairs = {{0, 0}, {1, 0}};
  CHECK_FALSE(dup_slot.feasible(2, 2));
  CHECK_THROWS_AS(social_welfare(dup_slot, inst), std::invalid_argument);
  Matching dup_ad;
  dup_ad.pairs = {{0, 0}, {0, 1}};
  CHECK_FALSE(dup_ad.feasible(2, 2));
  Matching out_of_range;
  out_of_range.pairs = {{2, 0}};
  CHECK_FALSE(out_of_range.feasible(2, 2));
}

TEST_CASE("instance construction validates input") {
  CHECK_THROWS_AS(Instance({{-1.0}}, Metric::single_point(), DiscountModel::NearestNeighbor), std::invalid_argument);
  CHECK_THROWS_AS(Instance({{1.0, 2.0}}, Metric::single_point(), DiscountModel::NearestNeighbor),
                  std::invalid_argument);
  const Metric bad({{0.0, 1.0, 0.3}, {1.0, 0.0, 0.2}, {0.3, 0.2, 0.0}});
  CHECK_THROWS_AS(Instance({{1.0, 1.0, 1.0}}, bad, DiscountModel::NearestNeighbor), std::invalid_argument);
  CHECK(parse_model("pd") == DiscountModel::ProductDistance);
  CHECK_THROWS(parse_model("xx"));
}

TEST_CASE("property: discounts are in [0,1] and shrink as the occupied set grows") {
  Rng rng = make_stream(11, 0);
  for (int rep = 0; rep < 300; ++rep) {
    const int m = pick(rng, 1, 7);
    const Metric metric = testing::any_metric(m, rng);
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    for (int k = m - 1; k > 0; --k) std::swap(order[k], order[uniform_index(rng, k + 1)]);
    const int j = order[0];
    std::vector<int> small{j};
    double prev_nn = 1.0, prev_pd = 1.0;
    for (int t = 1; t <= m; ++t) {
      std::vector<int> s(order.begin(), order.begin() + t);
      std::sort(s.begin(), s.end());
      const double nn = nn_discount(j, s, metric), pd = pd_discount(j, s, metric);
      CHECK(nn >= 0.0);
      CHECK(nn <= 1.0);
      CHECK(pd >= 0.0);
      CHECK(pd <= 1.0);
      CHECK(nn <= prev_nn);
      CHECK(pd <= prev_pd);
      prev_nn = nn;
      prev_pd = pd;
    }
  }
}

TEST_CASE("property: welfare is invariant to relabeling advertisers with equal rows") {
  Rng rng = make_stream(12, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const int m = pick(rng, 1, 5);
    const Metric metric = testing::any_metric(m, rng);
    std::vector<double> row(m);
    for (double& x : row) x = uniform01(rng);
    const int n = pick(rng, 2, 4);
    const auto model = rep % 2 ? DiscountModel::ProductDistance : DiscountModel::NearestNeighbor;
    const Instance inst(std::vector<std::vector<double>>(n, row), metric, model);
    Matching mt;
    std::vector<int> slots(m);
    std::iota(slots.begin(), slots.end(), 0);
    const int size = std::min(n, m);
    for (int k = 0; k < size; ++k) mt.pairs.emplace_back(k, slots[k]);
    Matching relabeled = mt;
    for (auto& [i, j] : relabeled.pairs) i = size - 1 - i;
    CHECK(social_welfare(mt, inst) == doctest::Approx(social_welfare(relabeled, inst)).epsilon(1e-14));
  }
}

TEST_CASE("helpers on instances leave the original untouched") {
  const Instance inst({{1.0, 2.0}}, testing::two_point(0.5), DiscountModel::NearestNeighbor);
  const Instance scaled = inst.with_scaled_row(0, 3.0);
  CHECK(scaled.value(0, 1) == 6.0);
  CHECK(inst.value(0, 1) == 2.0);
  CHECK(inst.with_value(0, 0, 4.0).value(0, 0) == 4.0);
  const FactorizedInstance f{{1.0, 0.5}, {2.0, 3.0}, testing::two_point(0.5)};
  const Instance fi = f.to_instance();
  CHECK(fi.n() == 2);
  CHECK(fi.value(1, 1) == 1.5);
}
