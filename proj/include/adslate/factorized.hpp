#pragma once

// Factorized nearest-neighbour model v(i,j) = w_i u_j: ordered-weight norms,
// radius-based slot preselection with greedy assignment, the stochastic
// variant driven by expected order statistics, and step-function payments.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adslate/core.hpp"
#include "adslate/gpds.hpp"
#include "adslate/random.hpp"

namespace adslate {

class ValueDistribution {
 public:
  enum class Kind { PointMass, Uniform, Discrete, Empirical };

  static ValueDistribution point_mass(double v);
  static ValueDistribution uniform(double a, double b);
  static ValueDistribution discrete(std::vector<double> support, std::vector<double> probs);
  static ValueDistribution empirical(std::vector<double> samples);

  Kind kind() const { return kind_; }
  double lo() const { return a_; }
  double hi() const { return b_; }
  /// Support points (point mass, discrete, empirical).
  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }

  double sample(Rng& rng) const;
  double mean() const;
  /// Finite atom list when the law is purely atomic.
  bool atomic() const { return kind_ != Kind::Uniform; }

  friend bool operator==(const ValueDistribution&, const ValueDistribution&) = default;

 private:
  Kind kind_ = Kind::PointMass;
  double a_ = 0.0, b_ = 0.0;
  std::vector<double> support_, probs_, cdf_;
};

const char* to_string(ValueDistribution::Kind kind);

/// Copy sorted non-increasing.
std::vector<double> sorted_desc(std::vector<double> v);
/// Indices ordered by value descending, smaller index first on ties.
std::vector<int> order_desc(const std::vector<double>& v);

/// f(Z; W) = sum_k z_k w_k over the two sorted views, k up to |Z| (W padded with zeros).
double norm_f(const std::vector<double>& z, const std::vector<double>& w);

/// Z(S): u_j times the nearest-neighbour discount within S for j in S, else 0.
std::vector<double> quality_vector(const std::vector<int>& slots, const std::vector<double>& u, const Metric& metric);
/// U(S): u_j for j in S, else 0.
std::vector<double> weight_vector(const std::vector<int>& slots, const std::vector<double>& u);

struct SlotSelection {
  std::vector<int> slots;        // ascending
  std::vector<double> quality;   // Z(slots), one entry per slot of the instance
};

SlotSelection make_selection(std::vector<int> slots, const std::vector<double>& u, const Metric& metric);

/// Scan slots by u descending (index tie-break); keep j when it is at least r
/// from every slot kept so far.
SlotSelection select_slots_radius(const std::vector<double>& u, const Metric& metric, double r);

struct FactorizedAssignment {
  Matching matching;
  /// f(Z(S); W): slots of S left without an advertiser still count as occupied.
  double welfare = 0.0;
  std::vector<double> quantity;  // quality received by each advertiser
};

/// k-th largest w goes to the slot with the k-th largest quality.
FactorizedAssignment greedy_assign(const SlotSelection& sel, const std::vector<double>& w);

/// Smallest L with 2^L >= m^2.
int logm_levels(int m);
double logm_radius(int level);

FactorizedAssignment logm_allocate_level(const FactorizedInstance& inst, int level);
FactorizedAssignment logm_allocate(const FactorizedInstance& inst, Rng& rng);
/// Mean welfare over all L+1 radii, i.e. the exact expectation of logm_allocate.
double logm_expected_welfare(const FactorizedInstance& inst);

struct EdgeCaseCheck {
  std::vector<std::vector<int>> parts;  // parts[l], l = 1..L (parts[0] empty)
  double lhs = 0.0;  // f(U(S_L); W) 2^(1-L)
  double rhs = 0.0;  // 4 f(Z(S~_0); W)
  bool holds() const { return lhs <= rhs; }
};

/// Splits S by nearest-neighbour distance into (2^-l, 2^(1-l)] bands and
/// evaluates the tail inequality against the r = 1 preselection.
EdgeCaseCheck edge_case_check(const FactorizedInstance& inst, const std::vector<int>& slots);

/// Gamma: expected k-th largest of one joint draw. Exact when every law is atomic
/// and the joint support has at most `exact_limit` outcomes, Monte Carlo otherwise.
std::vector<double> gamma_order_stats(const std::vector<ValueDistribution>& dists, std::int64_t samples,
                                      std::uint64_t seed, std::int64_t exact_limit = 100'000);
std::vector<double> gamma_order_stats_serial(const std::vector<ValueDistribution>& dists, std::int64_t samples,
                                             std::uint64_t seed, std::int64_t exact_limit = 100'000);

std::vector<double> draw_values(const std::vector<ValueDistribution>& dists, Rng& rng);

/// Slot weights and metric with advertiser values drawn from known laws.
struct StochasticInstance {
  std::vector<double> u;
  std::vector<ValueDistribution> dists;
  Metric metric;

  int m() const { return static_cast<int>(u.size()); }
  int n() const { return static_cast<int>(dists.size()); }
  FactorizedInstance realize(std::vector<double> w) const { return {u, std::move(w), metric}; }
};

/// Preselects slots by running the LP rule (plain conversion) on values
/// u_j gamma_i, then assigns greedily on the reported values.
class StochasticMechanism {
 public:
  StochasticMechanism(StochasticInstance inst, std::int64_t gamma_samples, std::uint64_t gamma_seed);

  const StochasticInstance& instance() const { return inst_; }
  const std::vector<double>& gamma() const { return gamma_; }
  const Instance& surrogate() const { return allocator_.instance(); }
  const NnLpAllocator& allocator() const { return allocator_; }

  SlotSelection preselect(Rng& rng) const;
  FactorizedAssignment allocate(Rng& rng, const std::vector<double>& w) const;

 private:
  StochasticInstance inst_;
  std::vector<double> gamma_;
  NnLpAllocator allocator_;
};

using VectorNorm = std::function<double(const std::vector<double>&)>;

/// W -> f(Z; W) for a fixed weight vector Z.
VectorNorm ordered_norm(std::vector<double> z);
/// g_S(W) = f(Z(S); W).
VectorNorm g_norm(const std::vector<int>& slots, const std::vector<double>& u, const Metric& metric);
/// h(W) = max over S of g_S(W); enumerates all slot subsets (m <= 20).
VectorNorm h_norm(const std::vector<double>& u, const Metric& metric);

struct NormSandwich {
  double at_mean = 0.0;  // norm of the empirical mean of sorted draws
  double mean_of = 0.0;  // empirical mean of the norm
  double ratio() const { return at_mean > 0.0 ? mean_of / at_mean : 1.0; }
};

/// Both sides estimated from the same draws.
NormSandwich empirical_norm_sandwich(const std::vector<ValueDistribution>& dists, const VectorNorm& norm,
                                     std::int64_t samples, std::uint64_t seed);

/// Position of advertiser i among the bids when bidding b: others with a higher
/// bid, or an equal bid and a smaller index, rank above.
int bid_rank(const std::vector<double>& bids, int i, double b);
/// Quality advertiser i receives when bidding b against the other bids.
double step_quantity(const SlotSelection& sel, const std::vector<double>& bids, int i, double b);
/// b q(b) minus the integral of q over [0, b], evaluated piece by piece.
double factorized_payment(const SlotSelection& sel, const std::vector<double>& bids, int i);

}  // namespace adslate
