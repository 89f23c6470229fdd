#pragma once

// Nearest-neighbour constant-factor pipeline: reduction to grouped
// pseudo-disk selection, LP relaxation, two-stage randomized rounding and
// conversion of the rounded selection back to a matching.

#include <cstdint>
#include <optional>
#include <vector>

#include "adslate/core.hpp"
#include "adslate/lpsolve.hpp"
#include "adslate/random.hpp"

namespace adslate {

/// Open ball around a metric point: covers p iff d(p, center) < radius.
struct PseudoDisk {
  int center = 0;
  double radius = 0.0;
  double weight = 0.0;
  // originating triple (advertiser, slot, partner slot); -1 when synthetic
  int advertiser = -1;
  int slot = -1;
  int partner = -1;
};

struct GpdsInstance {
  std::vector<PseudoDisk> disks;
  std::vector<std::vector<int>> groups;  // partition of disk indices
  Metric metric;

  int size() const { return static_cast<int>(disks.size()); }
  bool covers(int disk, int point) const {
    return metric(point, disks[disk].center) < disks[disk].radius;
  }
  /// Group index of every disk.
  std::vector<int> group_of() const;
  /// Throws std::invalid_argument unless groups partition the disk indices.
  void validate() const;
};

enum class GpdsConstraint { PointPacking /* (I) */, CenterFree /* (II) */ };

/// Empty string when `chosen` is feasible under the constraint (and at most
/// one disk per group), otherwise the reason.
std::string gpds_infeasibility(const GpdsInstance& gpds, const std::vector<int>& chosen, GpdsConstraint constraint);

double selection_value(const GpdsInstance& gpds, const std::vector<int>& chosen);

/// One group per advertiser; disk (i,j,j') = (j, d(j,j')/2, v(i,j) d(j,j')) for
/// every ordered pair j != j'. Index = (i*m + j)*(m-1) + rank of j' among j' != j.
/// For m < 2 the result has no disks.
GpdsInstance reduce_nn_to_gpds(const Instance& instance);

/// LP relaxation over the positive-weight disks. `disk_of_var[v]` maps LP
/// variables back to disk indices; empty coverage or group rows are omitted.
struct LpRelaxation {
  LinearProgram lp;
  std::vector<int> disk_of_var;
};

LpRelaxation build_lp_relax(const GpdsInstance& gpds);

/// Optimum of the relaxation, x* expanded to one entry per disk (pruned disks get 0).
struct RelaxedSolution {
  double objective = 0.0;
  std::vector<double> xstar;
};

RelaxedSolution solve_lp_relax(const GpdsInstance& gpds);

/// Per-disk data for two-stage rounding that depends only on x*: conflict
/// lists (same group, or covering the disk's center) and stage-two admission
/// probabilities.
class RoundingPlan {
 public:
  RoundingPlan(const GpdsInstance& gpds, std::vector<double> xstar);

  int size() const { return static_cast<int>(xstar_.size()); }
  const std::vector<double>& xstar() const { return xstar_; }
  double admission(int disk) const { return admission_[disk]; }
  /// prod over conflicting i' of (1 - x*_{i'}/3); always >= 1/3 for LP-feasible x*.
  double denominator(int disk) const { return denominator_[disk]; }
  const std::vector<int>& conflicts(int disk) const { return conflicts_[disk]; }

  /// One rounding trial. Consumes exactly 2N uniforms from `rng`, whatever the outcome.
  std::vector<int> round(Rng& rng) const;
  /// Same as round(), writing stage-two membership into `selected` (size N) and
  /// reusing `in_first` as scratch.
  void round_into(Rng& rng, std::vector<char>& in_first, std::vector<char>& selected) const;

 private:
  std::vector<double> xstar_;
  std::vector<std::vector<int>> conflicts_;
  std::vector<double> denominator_;
  std::vector<double> admission_;
};

/// Two-stage rounding of a feasible x*. The result satisfies the center-free constraint.
Selection round_lp(const GpdsInstance& gpds, const std::vector<double>& xstar, Rng& rng);

/// Per-disk empirical frequency of landing in the rounded selection.
std::vector<double> inclusion_frequencies(const RoundingPlan& plan, std::int64_t trials, std::uint64_t seed);
std::vector<double> inclusion_frequencies_serial(const RoundingPlan& plan, std::int64_t trials, std::uint64_t seed);

enum class ConversionMode { Plain, Virtual };

const char* to_string(ConversionMode mode);
ConversionMode parse_conversion_mode(const std::string& s);

/// Matching on `instance` (plain mode) or on an extended instance carrying one
/// virtual slot and zero-value advertiser per chosen disk (virtual mode).
struct ConvertedAllocation {
  Matching matching;
  std::optional<Instance> extended;  // set in virtual mode

  const Instance& evaluated_on(const Instance& original) const { return extended ? *extended : original; }
  double welfare(const Instance& original) const { return social_welfare(matching, evaluated_on(original)); }
};

/// Requires a center-free selection with at most one disk per group, all
/// disks produced by reduce_nn_to_gpds(instance).
ConvertedAllocation selection_to_matching(const Selection& sel, const GpdsInstance& gpds, const Instance& instance,
                                          ConversionMode mode);

/// Reduction, LP and rounding plan computed once for an instance; each call to
/// allocate() is one independent run of the randomized rule.
class NnLpAllocator {
 public:
  explicit NnLpAllocator(const Instance& instance);

  const Instance& instance() const { return instance_; }
  const GpdsInstance& gpds() const { return gpds_; }
  double lp_objective() const { return relaxed_.objective; }
  const std::vector<double>& xstar() const { return relaxed_.xstar; }
  const RoundingPlan& plan() const { return *plan_; }
  /// True for m == 1, where the single slot goes to the highest value.
  bool single_slot() const { return instance_.m() == 1; }

  struct Outcome {
    Selection selection;
    ConvertedAllocation allocation;
    double welfare = 0.0;
  };

  Outcome allocate(Rng& rng, ConversionMode mode) const;

  /// Mean welfare over `trials` independent streams (seed, t).
  double mean_welfare(std::int64_t trials, std::uint64_t seed, ConversionMode mode) const;
  double mean_welfare_serial(std::int64_t trials, std::uint64_t seed, ConversionMode mode) const;

  /// Exact expected welfare in virtual mode: sum_i (x*_i / 9) (w_i / 2).
  double expected_virtual_welfare() const;

 private:
  double trial_welfare(std::uint64_t seed, std::int64_t t, ConversionMode mode) const;

  Instance instance_;
  GpdsInstance gpds_;
  RelaxedSolution relaxed_;
  std::optional<RoundingPlan> plan_;
};

/// One run of the full pipeline.
NnLpAllocator::Outcome nn_constant_approx(const Instance& instance, Rng& rng, ConversionMode mode);

}  // namespace adslate
