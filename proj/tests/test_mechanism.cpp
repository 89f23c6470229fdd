#include <cmath>
#include <memory>
#include <vector>

#include "adslate/factorized.hpp"
#include "adslate/mechanism.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace adslate;
using testing::pick;

namespace {

FactorizedInstance lone_slot(std::vector<double> w, double u = 0.8) {
  return {{u}, std::move(w), Metric::single_point()};
}

}  // namespace

TEST_CASE("deterministic step curve") {
  // probe advertiser 1 against a single rival bid of 3; ties go to the smaller index
  const auto rule = make_logm_rule(lone_slot({3.0, 1.0}), 0);
  CHECK_FALSE(rule->randomized());
  const auto c = expected_allocation_curve(*rule, 1, {1.0, 5.0}, 1, 1);
  REQUIRE(c.step);
  CHECK(c.bids == std::vector<double>{0.0, 1.0, 3.0, 5.0});
  CHECK(c.quantities == std::vector<double>{0.0, 0.0, 0.0, 0.8});
  CHECK(c.between == std::vector<double>{0.0, 0.0, 0.8});
  CHECK(myerson_payment_from_curve(c, 5.0) == doctest::Approx(3.0 * 0.8));
  CHECK(myerson_payment_from_curve(c, 1.0) == 0.0);
  CHECK_THROWS_AS(myerson_payment_from_curve(c, 4.0), std::invalid_argument);
}

TEST_CASE("payment integration edge cases") {
  ExpectedAllocationCurve flat;
  flat.bids = {0.0, 1.0, 2.0};
  flat.quantities = {0.5, 0.5, 0.5};
  flat.stderrs = {0.0, 0.0, 0.0};
  flat.between = {0.5, 0.5};
  flat.step = true;
  CHECK(myerson_payment_from_curve(flat, 2.0) == 0.0);

  auto none = flat;
  none.quantities = {0.0, 0.0, 0.0};
  none.between = {0.0, 0.0};
  CHECK(myerson_payment_from_curve(none, 2.0) == 0.0);

  auto falling = flat;
  falling.quantities = {0.5, 0.5, 0.1};
  falling.between = {0.5, 0.3};
  CHECK_THROWS_AS(myerson_payment_from_curve(falling, 1.0), MonotonicityViolation);

  auto noisy = flat;
  noisy.step = false;
  noisy.quantities = {0.5, 0.49, 0.6};
  noisy.stderrs = {0.01, 0.01, 0.01};
  CHECK_NOTHROW(myerson_payment_from_curve(noisy, 2.0));
  noisy.quantities = {0.5, 0.3, 0.6};
  CHECK_THROWS_AS(myerson_payment_from_curve(noisy, 2.0), MonotonicityViolation);

  auto shifted = flat;
  shifted.bids = {0.5, 1.0, 2.0};
  CHECK_THROWS_AS(myerson_payment_from_curve(shifted, 1.0), std::invalid_argument);
}

TEST_CASE("an advertiser with no value receives nothing") {
  const Instance inst({{0.0, 0.0}, {0.4, 0.9}}, testing::two_point(0.7), DiscountModel::NearestNeighbor);
  const auto lp = make_lp_rule(inst);
  const auto c = exact_expected_curve(*lp, 0, {0.5, 1.0, 4.0});
  for (double q : c.quantities) CHECK(q == 0.0);
  const auto single = make_single_slot_rule(inst);
  CHECK(single->breakpoints(0).empty());
  const auto s = expected_allocation_curve(*single, 0, {1.0, 10.0}, 1, 1);
  for (double q : s.quantities) CHECK(q == 0.0);
}

TEST_CASE("sampled LP curve matches its exact expectation") {
  Rng rng = make_stream(81, 0);
  const Instance inst = gen_nn_instance(2, 3, gen_random_metric(3, rng), rng);
  const auto rule = make_lp_rule(inst);
  REQUIRE(rule->randomized());
  const auto sampled = expected_allocation_curve(*rule, 0, {0.5, 1.0, 2.0}, 20'000, 5);
  const auto exact = exact_expected_curve(*rule, 0, {0.5, 1.0, 2.0});
  REQUIRE(sampled.bids == exact.bids);
  for (std::size_t k = 0; k < exact.bids.size(); ++k)
    CHECK(std::abs(sampled.quantities[k] - exact.quantities[k]) <= 4.0 * sampled.stderrs[k] + 1e-12);
  // base bid 1 reproduces the unscaled allocator
  const NnLpAllocator alloc(inst);
  double own = 0.0;
  for (int d : alloc.gpds().groups[0]) own += alloc.xstar()[d] / 9.0 * inst.value(0, alloc.gpds().disks[d].slot) *
                                             alloc.gpds().disks[d].radius;
  CHECK(*rule->expected(0, 1.0) == doctest::Approx(own).epsilon(1e-9));
}

TEST_CASE("exact curves need an exact expectation") {
  const auto inverted = make_inverted_rank_rule(lone_slot({1.0, 2.0}));
  CHECK_THROWS_AS(exact_expected_curve(*inverted, 0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(expected_allocation_curve(*inverted, 2, {1.0}, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(expected_allocation_curve(*inverted, 0, {-1.0}, 1, 1), std::invalid_argument);
}

TEST_CASE("monotonicity probes") {
  const FactorizedInstance inst{{1.0, 0.6, 0.3}, {0.5, 0.2, 0.9}, testing::line_metric({0.0, 0.5, 1.0})};
  std::vector<std::pair<double, double>> pairs;
  for (double lo : {0.0, 0.1, 0.3, 0.6})
    for (double hi : {0.7, 1.0, 2.0}) pairs.emplace_back(lo, hi);

  for (int level = 0; level <= logm_levels(inst.m()); ++level) {
    const auto rule = make_logm_rule(inst, level);
    for (int i = 0; i < inst.n(); ++i) CHECK(monotonicity_probe(*rule, i, pairs, 1, 1).ok());
  }
  const auto randomized = make_logm_rule(inst);
  CHECK(monotonicity_probe(*randomized, 0, pairs, 2'000, 3).ok());

  const auto inverted = make_inverted_rank_rule(inst);
  const auto report = monotonicity_probe(*inverted, 0, pairs, 1, 1);
  CHECK(report.pairs == static_cast<std::int64_t>(pairs.size()));
  CHECK_FALSE(report.ok());
  const auto curve = expected_allocation_curve(*inverted, 0, default_bid_grid(*inverted, 0), 1, 1);
  CHECK_THROWS_AS(myerson_payment_from_curve(curve, curve.bids.back()), MonotonicityViolation);
}

TEST_CASE("property: the relaxation optimum never drops when a value rises") {
  Rng rng = make_stream(82, 0);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = pick(rng, 1, 3), m = pick(rng, 2, 4);
    const Instance inst = gen_nn_instance(n, m, testing::any_metric(m, rng), rng);
    const int i = pick(rng, 0, n - 1), j = pick(rng, 0, m - 1);
    std::vector<double> values;
    for (int k = 0; k <= 6; ++k) values.push_back(inst.value(i, j) + 0.3 * k);
    const auto r = lp_objective_monotonicity(inst, i, j, values);
    CHECK(r.raises == 6);
    CHECK(r.ok());
  }
}

TEST_CASE("property: truthful bidding is optimal and payments stay within the bid's value") {
  Rng rng = make_stream(83, 0);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = pick(rng, 1, 4), m = pick(rng, 1, 4);
    const FactorizedInstance inst = gen_factorized(n, testing::any_metric(m, rng), rng);
    const auto rule = make_logm_rule(inst);
    const int i = pick(rng, 0, n - 1);
    const auto c = exact_expected_curve(*rule, i, default_bid_grid(*rule, i));
    for (std::size_t k = 0; k < c.bids.size(); ++k) {
      const double b = c.bids[k];
      const double p = myerson_payment_from_curve(c, b);
      CHECK(p >= 0.0);
      CHECK(p <= b * c.quantities[k] + 1e-12);
      CHECK(truthfulness_audit(c, b).ok(1e-12 * std::max(1.0, b)));
    }
  }
}

TEST_CASE("stochastic rule wiring") {
  StochasticInstance si{{1.0, 0.5}, {ValueDistribution::point_mass(0.4), ValueDistribution::uniform(0.0, 1.0)},
                        testing::two_point(0.8)};
  const auto mech = std::make_shared<const StochasticMechanism>(si, 10'000, 2);
  CHECK_THROWS_AS(make_stochastic_rule(mech, {0.4}), std::invalid_argument);
  const auto rule = make_stochastic_rule(mech, {0.4, 0.7});
  CHECK(rule->randomized());
  CHECK(rule->breakpoints(0) == std::vector<double>{0.7});
  const auto c = expected_allocation_curve(*rule, 0, default_bid_grid(*rule, 0), 2'000, 4);
  for (std::size_t k = 1; k < c.bids.size(); ++k) CHECK(c.quantities[k] >= c.quantities[k - 1] - 1e-12);
  CHECK(truthfulness_audit(c, 0.4).ok(1e-9));
}
