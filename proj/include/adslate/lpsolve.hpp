#pragma once

// Dense two-phase primal simplex with Bland's rule, sized for the small
// packing LPs produced by the pseudo-disk relaxation.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace adslate {

/// a . x <= bound
struct LinearConstraint {
  std::vector<double> coeffs;
  double bound = 0.0;
};

struct LinearProgram {
  std::vector<double> objective;                    // maximize objective . x
  std::vector<LinearConstraint> constraints;
  std::vector<std::pair<double, double>> bounds;    // per-variable [lo, hi]; hi may be +inf

  int variables() const { return static_cast<int>(objective.size()); }
  /// Adds a variable-bounds entry [0,1] for every variable.
  static LinearProgram unit_box(std::vector<double> objective);
};

struct LpSolution {
  double value = 0.0;
  std::vector<double> x;
  std::int64_t pivots = 0;
};

class LpError : public std::runtime_error {
 public:
  enum class Kind { Infeasible, Unbounded, IterationLimit, Malformed };
  LpError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct SimplexOptions {
  double tolerance = 1e-9;
  std::int64_t max_pivots = 1'000'000;
};

inline constexpr double kLpFeasibilityTol = 1e-7;

LpSolution solve_lp_max(const LinearProgram& lp, const SimplexOptions& options = {});

/// Largest a.x - b over all constraints and bounds (0 when feasible).
double max_violation(const LinearProgram& lp, const std::vector<double>& x);

}  // namespace adslate
