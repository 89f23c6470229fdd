#pragma once

// Single-parameter payment tooling: allocation rules seen through one
// advertiser's bid, expected allocation curves, payment integration and
// monotonicity probes.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adslate/core.hpp"
#include "adslate/factorized.hpp"
#include "adslate/gpds.hpp"
#include "adslate/random.hpp"

namespace adslate {

/// Quantity received by the probed advertiser in one run of the rule.
using QuantitySampler = std::function<double(Rng&)>;

class SingleParameterRule {
 public:
  virtual ~SingleParameterRule() = default;
  virtual std::string name() const = 0;
  virtual bool randomized() const = 0;
  virtual int advertisers() const = 0;
  /// The bid advertiser i reports in the base profile.
  virtual double base_bid(int i) const = 0;
  /// Sampler for advertiser i bidding b with every other bid fixed.
  virtual QuantitySampler at(int i, double b) const = 0;
  /// Exact expectation of the sampler, when cheap to compute.
  virtual std::optional<double> expected(int /*i*/, double /*b*/) const { return std::nullopt; }
  /// Bids at which the quantity may jump (exact for deterministic rules).
  virtual std::vector<double> breakpoints(int /*i*/) const { return {}; }
};

/// LP rounding rule with virtual conversion. The bid scales the advertiser's
/// value row; the quantity is base value times realized discount.
std::unique_ptr<SingleParameterRule> make_lp_rule(const Instance& base);
/// Radius preselection; a fixed level gives the deterministic rule, otherwise
/// the level is drawn per run.
std::unique_ptr<SingleParameterRule> make_logm_rule(const FactorizedInstance& inst, std::optional<int> level = {});
/// Stochastic preselection followed by greedy assignment on the reported values.
std::unique_ptr<SingleParameterRule> make_stochastic_rule(std::shared_ptr<const StochasticMechanism> mech,
                                                          std::vector<double> reported);
/// Best single (advertiser, slot) pair; the bid scales the value row.
std::unique_ptr<SingleParameterRule> make_single_slot_rule(const Instance& base);
/// Planted non-monotone control: highest bid gets the lowest quality.
std::unique_ptr<SingleParameterRule> make_inverted_rank_rule(const FactorizedInstance& inst);

struct ExpectedAllocationCurve {
  std::vector<double> bids;        // strictly increasing, bids[0] = 0
  std::vector<double> quantities;
  std::vector<double> stderrs;
  std::vector<double> between;     // step curves: quantity on (bids[k], bids[k+1])
  std::int64_t trials = 1;
  bool step = false;
};

/// {0} + breakpoints + 32 evenly spaced bids up to twice the largest relevant bid.
std::vector<double> default_bid_grid(const SingleParameterRule& rule, int i);

/// Deterministic rules are evaluated exactly at every grid bid and between
/// consecutive bids. Randomized rules average `trials` runs that share the
/// per-trial stream across bids.
ExpectedAllocationCurve expected_allocation_curve(const SingleParameterRule& rule, int i, std::vector<double> grid,
                                                  std::int64_t trials, std::uint64_t seed);

/// Curve built from the rule's exact expectation (randomized rules that provide one).
ExpectedAllocationCurve exact_expected_curve(const SingleParameterRule& rule, int i, std::vector<double> grid);

class MonotonicityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// b q(b) minus the area under the curve on [0, b]; b must be a grid bid.
/// Throws MonotonicityViolation when the curve drops by more than 3 standard errors.
double myerson_payment_from_curve(const ExpectedAllocationCurve& curve, double b);

struct ProbeViolation {
  double low_bid = 0.0, high_bid = 0.0;
  double low_quantity = 0.0, high_quantity = 0.0;
  double tolerance = 0.0;
};

struct MonotonicityReport {
  std::int64_t pairs = 0;
  std::vector<ProbeViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// q(b) <= q(b') for each pair b < b'; exact for deterministic rules, within
/// three paired standard errors otherwise.
MonotonicityReport monotonicity_probe(const SingleParameterRule& rule, int i,
                                      const std::vector<std::pair<double, double>>& bid_pairs, std::int64_t trials,
                                      std::uint64_t seed);

struct LpMonotonicityReport {
  std::int64_t raises = 0;
  std::vector<std::pair<double, double>> violations;  // (objective before, after)
  bool ok() const { return violations.empty(); }
};

/// Raises v(i,j) through `values` (ascending) and checks the relaxation optimum never drops.
LpMonotonicityReport lp_objective_monotonicity(const Instance& instance, int i, int j,
                                               const std::vector<double>& values);

struct TruthfulnessReport {
  double truthful_utility = 0.0;
  double best_deviation_utility = 0.0;
  double best_deviation_bid = 0.0;
  bool ok(double tol) const { return best_deviation_utility <= truthful_utility + tol; }
};

/// Utility v q(b) - p(b) for every grid bid against bidding the true value v
/// (which must be a grid bid).
TruthfulnessReport truthfulness_audit(const ExpectedAllocationCurve& curve, double true_value);

}  // namespace adslate
