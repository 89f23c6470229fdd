#include "adslate/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adslate/parallel.hpp"
#include "adslate/proddist.hpp"

namespace adslate {

namespace {

double realized_discount_quantity(const Instance& base, int i, const NnLpAllocator::Outcome& out,
                                  const Instance& original) {
  for (auto [adv, slot] : out.allocation.matching.pairs) {
    if (adv != i) continue;
    const Instance& on = out.allocation.evaluated_on(original);
    const auto occupied = out.allocation.matching.occupied_slots();
    return base.value(i, slot) * discount(on.model(), slot, occupied, on.metric());
  }
  return 0.0;
}

class LpRule final : public SingleParameterRule {
 public:
  explicit LpRule(Instance base) : base_(std::move(base)) {}
  std::string name() const override { return "lp"; }
  bool randomized() const override { return true; }
  int advertisers() const override { return base_.n(); }
  double base_bid(int) const override { return 1.0; }

  QuantitySampler at(int i, double b) const override {
    auto inst = std::make_shared<Instance>(base_.with_scaled_row(i, b));
    auto alloc = std::make_shared<NnLpAllocator>(*inst);
    return [this, i, inst, alloc](Rng& rng) {
      return realized_discount_quantity(base_, i, alloc->allocate(rng, ConversionMode::Virtual), *inst);
    };
  }

  std::optional<double> expected(int i, double b) const override {
    const NnLpAllocator alloc(base_.with_scaled_row(i, b));
    if (alloc.single_slot()) {
      Rng unused(0);
      return realized_discount_quantity(base_, i, alloc.allocate(unused, ConversionMode::Virtual), alloc.instance());
    }
    double total = 0.0;
    const auto& gpds = alloc.gpds();
    for (int d : gpds.groups[i]) {
      const auto& disk = gpds.disks[d];
      const double dist = base_.metric()(disk.slot, disk.partner);
      total += (alloc.xstar()[d] / 9.0) * (base_.value(i, disk.slot) * dist / 2.0);
    }
    return total;
  }

 private:
  Instance base_;
};

class LogmRule final : public SingleParameterRule {
 public:
  LogmRule(FactorizedInstance inst, std::optional<int> level) : inst_(std::move(inst)), level_(level) {
    const int L = logm_levels(inst_.m());
    if (level_ && (*level_ < 0 || *level_ > L)) throw std::invalid_argument("level out of range");
    for (int l = 0; l <= L; ++l) selections_.push_back(select_slots_radius(inst_.u, inst_.metric, logm_radius(l)));
  }
  std::string name() const override { return level_ ? "logm-level" : "logm"; }
  bool randomized() const override { return !level_; }
  int advertisers() const override { return inst_.n(); }
  double base_bid(int i) const override { return inst_.w[i]; }

  QuantitySampler at(int i, double b) const override {
    auto bids = inst_.w;
    bids[i] = b;
    return [this, i, b, bids = std::move(bids)](Rng& rng) {
      const int l = level_ ? *level_ : static_cast<int>(uniform_index(rng, selections_.size()));
      return step_quantity(selections_[l], bids, i, b);
    };
  }

  std::optional<double> expected(int i, double b) const override {
    auto bids = inst_.w;
    bids[i] = b;
    if (level_) return step_quantity(selections_[*level_], bids, i, b);
    double total = 0.0;
    for (const auto& sel : selections_) total += step_quantity(sel, bids, i, b);
    return total / static_cast<double>(selections_.size());
  }

  std::vector<double> breakpoints(int i) const override {
    std::vector<double> out;
    for (int j = 0; j < inst_.n(); ++j)
      if (j != i) out.push_back(inst_.w[j]);
    return out;
  }

 private:
  FactorizedInstance inst_;
  std::optional<int> level_;
  std::vector<SlotSelection> selections_;
};

class StochasticRule final : public SingleParameterRule {
 public:
  StochasticRule(std::shared_ptr<const StochasticMechanism> mech, std::vector<double> reported)
      : mech_(std::move(mech)), reported_(std::move(reported)) {
    if (static_cast<int>(reported_.size()) != mech_->instance().n())
      throw std::invalid_argument("one reported value per advertiser expected");
  }
  std::string name() const override { return "stochastic"; }
  bool randomized() const override { return true; }
  int advertisers() const override { return static_cast<int>(reported_.size()); }
  double base_bid(int i) const override { return reported_[i]; }

  QuantitySampler at(int i, double b) const override {
    auto bids = reported_;
    bids[i] = b;
    return [this, i, b, bids = std::move(bids)](Rng& rng) {
      return step_quantity(mech_->preselect(rng), bids, i, b);
    };
  }

  std::vector<double> breakpoints(int i) const override {
    std::vector<double> out;
    for (int j = 0; j < advertisers(); ++j)
      if (j != i) out.push_back(reported_[j]);
    return out;
  }

 private:
  std::shared_ptr<const StochasticMechanism> mech_;
  std::vector<double> reported_;
};

class SingleSlotRule final : public SingleParameterRule {
 public:
  explicit SingleSlotRule(Instance base) : base_(std::move(base)) {}
  std::string name() const override { return "single-slot"; }
  bool randomized() const override { return false; }
  int advertisers() const override { return base_.n(); }
  double base_bid(int) const override { return 1.0; }

  QuantitySampler at(int i, double b) const override {
    const Matching m = single_slot_baseline(base_.with_scaled_row(i, b));
    const auto [adv, slot] = m.pairs.front();
    const double q = adv == i ? base_.value(i, slot) : 0.0;
    return [q](Rng&) { return q; };
  }

  std::vector<double> breakpoints(int i) const override {
    const double own = row_max(i);
    std::vector<double> out;
    if (own <= 0.0) return out;
    for (int k = 0; k < base_.n(); ++k)
      if (k != i) out.push_back(row_max(k) / own);
    return out;
  }

 private:
  double row_max(int i) const {
    double best = 0.0;
    for (int j = 0; j < base_.m(); ++j) best = std::max(best, base_.value(i, j));
    return best;
  }
  Instance base_;
};

class InvertedRankRule final : public SingleParameterRule {
 public:
  explicit InvertedRankRule(FactorizedInstance inst)
      : inst_(std::move(inst)), sel_(select_slots_radius(inst_.u, inst_.metric, 0.0)) {}
  std::string name() const override { return "inverted-rank"; }
  bool randomized() const override { return false; }
  int advertisers() const override { return inst_.n(); }
  double base_bid(int i) const override { return inst_.w[i]; }

  QuantitySampler at(int i, double b) const override {
    auto bids = inst_.w;
    bids[i] = b;
    std::vector<double> q;
    for (int j : sel_.slots) q.push_back(sel_.quality[j]);
    q = sorted_desc(std::move(q));
    const int used = static_cast<int>(std::min(q.size(), bids.size()));
    const int rank = bid_rank(bids, i, b);
    const double out = rank < used ? q[used - 1 - rank] : 0.0;
    return [out](Rng&) { return out; };
  }

  std::vector<double> breakpoints(int i) const override {
    std::vector<double> out;
    for (int j = 0; j < inst_.n(); ++j)
      if (j != i) out.push_back(inst_.w[j]);
    return out;
  }

 private:
  FactorizedInstance inst_;
  SlotSelection sel_;
};

std::vector<double> normalize_grid(std::vector<double> grid) {
  for (double b : grid)
    if (!std::isfinite(b) || b < 0.0) throw std::invalid_argument("bids must be finite and >= 0");
  grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

struct Moments {
  double mean = 0.0;
  double stderr_ = 0.0;
};

Moments estimate(const QuantitySampler& sampler, std::int64_t trials, std::uint64_t seed) {
  const auto s = parallel::block_vector_sum(trials, 2, [&](std::int64_t t, std::vector<double>& acc) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(t));
    const double q = sampler(rng);
    acc[0] += q;
    acc[1] += q * q;
  });
  const double n = static_cast<double>(trials);
  Moments m;
  m.mean = s[0] / n;
  const double var = trials > 1 ? std::max(0.0, (s[1] - n * m.mean * m.mean) / (n - 1.0)) : 0.0;
  m.stderr_ = std::sqrt(var / n);
  return m;
}

double step_tolerance(double a, double b) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

std::unique_ptr<SingleParameterRule> make_lp_rule(const Instance& base) { return std::make_unique<LpRule>(base); }

std::unique_ptr<SingleParameterRule> make_logm_rule(const FactorizedInstance& inst, std::optional<int> level) {
  return std::make_unique<LogmRule>(inst, level);
}

std::unique_ptr<SingleParameterRule> make_stochastic_rule(std::shared_ptr<const StochasticMechanism> mech,
                                                          std::vector<double> reported) {
  return std::make_unique<StochasticRule>(std::move(mech), std::move(reported));
}

std::unique_ptr<SingleParameterRule> make_single_slot_rule(const Instance& base) {
  return std::make_unique<SingleSlotRule>(base);
}

std::unique_ptr<SingleParameterRule> make_inverted_rank_rule(const FactorizedInstance& inst) {
  return std::make_unique<InvertedRankRule>(inst);
}

std::vector<double> default_bid_grid(const SingleParameterRule& rule, int i) {
  std::vector<double> grid = rule.breakpoints(i);
  grid.push_back(rule.base_bid(i));
  double top = 1.0;
  for (double b : grid) top = std::max(top, b);
  top *= 2.0;
  for (int k = 1; k <= 32; ++k) grid.push_back(top * k / 32.0);
  return normalize_grid(std::move(grid));
}

ExpectedAllocationCurve expected_allocation_curve(const SingleParameterRule& rule, int i, std::vector<double> grid,
                                                  std::int64_t trials, std::uint64_t seed) {
  if (i < 0 || i >= rule.advertisers()) throw std::invalid_argument("advertiser out of range");
  ExpectedAllocationCurve c;
  if (!rule.randomized()) {
    auto br = rule.breakpoints(i);
    grid.insert(grid.end(), br.begin(), br.end());
  }
  c.bids = normalize_grid(std::move(grid));
  Rng unused(seed);
  if (!rule.randomized()) {
    c.step = true;
    c.trials = 1;
    for (double b : c.bids) {
      c.quantities.push_back(rule.at(i, b)(unused));
      c.stderrs.push_back(0.0);
    }
    for (std::size_t k = 0; k + 1 < c.bids.size(); ++k) {
      const double mid = 0.5 * (c.bids[k] + c.bids[k + 1]);
      c.between.push_back(rule.at(i, mid)(unused));
    }
    return c;
  }
  if (trials < 1) throw std::invalid_argument("randomized rules need at least one trial");
  c.trials = trials;
  for (double b : c.bids) {
    const auto m = estimate(rule.at(i, b), trials, seed);
    c.quantities.push_back(m.mean);
    c.stderrs.push_back(m.stderr_);
  }
  return c;
}

ExpectedAllocationCurve exact_expected_curve(const SingleParameterRule& rule, int i, std::vector<double> grid) {
  ExpectedAllocationCurve c;
  c.bids = normalize_grid(std::move(grid));
  c.trials = 0;
  for (double b : c.bids) {
    const auto e = rule.expected(i, b);
    if (!e) throw std::invalid_argument("rule '" + rule.name() + "' has no exact expectation");
    c.quantities.push_back(*e);
    c.stderrs.push_back(0.0);
  }
  return c;
}

double myerson_payment_from_curve(const ExpectedAllocationCurve& curve, double b) {
  const auto& x = curve.bids;
  const auto& q = curve.quantities;
  if (x.empty() || x.front() != 0.0) throw std::invalid_argument("curve must start at bid 0");
  const auto it = std::lower_bound(x.begin(), x.end(), b);
  if (it == x.end() || *it != b) throw std::invalid_argument("payment bid must be a grid bid");
  const std::size_t kb = static_cast<std::size_t>(it - x.begin());

  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    if (curve.step) {
      const double mid = curve.between[k];
      if (mid < q[k] - step_tolerance(mid, q[k]) || q[k + 1] < mid - step_tolerance(mid, q[k + 1]))
        throw MonotonicityViolation("step curve decreases near bid " + std::to_string(x[k + 1]));
    } else {
      const double tol = 3.0 * std::hypot(curve.stderrs[k], curve.stderrs[k + 1]) + step_tolerance(q[k], q[k + 1]);
      if (q[k + 1] < q[k] - tol)
        throw MonotonicityViolation("curve decreases beyond noise near bid " + std::to_string(x[k + 1]));
    }
  }

  double area = 0.0;
  for (std::size_t k = 0; k < kb; ++k) {
    const double width = x[k + 1] - x[k];
    area += curve.step ? width * curve.between[k] : width * 0.5 * (q[k] + q[k + 1]);
  }
  const double top = b * q[kb];
  return std::clamp(top - area, 0.0, std::max(0.0, top));
}

MonotonicityReport monotonicity_probe(const SingleParameterRule& rule, int i,
                                      const std::vector<std::pair<double, double>>& bid_pairs, std::int64_t trials,
                                      std::uint64_t seed) {
  MonotonicityReport report;
  Rng unused(seed);
  for (auto [lo, hi] : bid_pairs) {
    if (lo > hi) std::swap(lo, hi);
    ++report.pairs;
    const auto a = rule.at(i, lo), b = rule.at(i, hi);
    if (!rule.randomized()) {
      const double qa = a(unused), qb = b(unused);
      if (qb < qa - step_tolerance(qa, qb)) report.violations.push_back({lo, hi, qa, qb, 0.0});
      continue;
    }
    const auto s = parallel::block_vector_sum(trials, 4, [&](std::int64_t t, std::vector<double>& acc) {
      Rng ra = make_stream(seed, static_cast<std::uint64_t>(t));
      Rng rb = make_stream(seed, static_cast<std::uint64_t>(t));
      const double qa = a(ra), qb = b(rb);
      acc[0] += qa;
      acc[1] += qb;
      acc[2] += qb - qa;
      acc[3] += (qb - qa) * (qb - qa);
    });
    const double n = static_cast<double>(trials);
    const double mean = s[2] / n;
    const double var = trials > 1 ? std::max(0.0, (s[3] - n * mean * mean) / (n - 1.0)) : 0.0;
    const double tol = 3.0 * std::sqrt(var / n) + step_tolerance(s[0] / n, s[1] / n);
    if (mean < -tol) report.violations.push_back({lo, hi, s[0] / n, s[1] / n, tol});
  }
  return report;
}

LpMonotonicityReport lp_objective_monotonicity(const Instance& instance, int i, int j,
                                               const std::vector<double>& values) {
  LpMonotonicityReport report;
  double previous = -1.0;
  bool first = true;
  for (double v : values) {
    const double obj = solve_lp_relax(reduce_nn_to_gpds(instance.with_value(i, j, v))).objective;
    if (!first) {
      ++report.raises;
      if (obj < previous - 1e-9 * std::max(1.0, std::abs(previous))) report.violations.emplace_back(previous, obj);
    }
    previous = obj;
    first = false;
  }
  return report;
}

TruthfulnessReport truthfulness_audit(const ExpectedAllocationCurve& curve, double true_value) {
  TruthfulnessReport r;
  const auto it = std::lower_bound(curve.bids.begin(), curve.bids.end(), true_value);
  if (it == curve.bids.end() || *it != true_value) throw std::invalid_argument("true value must be a grid bid");
  r.truthful_utility = true_value * curve.quantities[it - curve.bids.begin()] -
                       myerson_payment_from_curve(curve, true_value);
  r.best_deviation_utility = r.truthful_utility;
  r.best_deviation_bid = true_value;
  for (std::size_t k = 0; k < curve.bids.size(); ++k) {
    const double b = curve.bids[k];
    const double u = true_value * curve.quantities[k] - myerson_payment_from_curve(curve, b);
    if (u > r.best_deviation_utility) {
      r.best_deviation_utility = u;
      r.best_deviation_bid = b;
    }
  }
  return r;
}

}  // namespace adslate
