#include "adslate/lpsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adslate {

LinearProgram LinearProgram::unit_box(std::vector<double> objective) {
  LinearProgram lp;
  lp.bounds.assign(objective.size(), {0.0, 1.0});
  lp.objective = std::move(objective);
  return lp;
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& c : lp.constraints) {
    double lhs = 0.0;
    for (std::size_t k = 0; k < c.coeffs.size(); ++k) lhs += c.coeffs[k] * x[k];
    worst = std::max(worst, lhs - c.bound);
  }
  for (std::size_t k = 0; k < lp.bounds.size(); ++k) {
    worst = std::max(worst, lp.bounds[k].first - x[k]);
    worst = std::max(worst, x[k] - lp.bounds[k].second);
  }
  return worst;
}

namespace {

// Row-major tableau; the last column holds the right-hand side.
class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * (cols + 1), 0.0) {}

  double& at(int r, int c) { return a_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double at(int r, int c) const { return a_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  double rhs(int r) const { return at(r, cols_); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void pivot(int pr, int pc, std::vector<double>& reduced, double& objective_value) {
    const double inv = 1.0 / at(pr, pc);
    for (int c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (int r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    const double f = reduced[pc];
    if (f != 0.0) {
      for (int c = 0; c < cols_; ++c) reduced[c] -= f * at(pr, c);
      objective_value += f * rhs(pr);
      reduced[pc] = 0.0;
    }
  }

 private:
  int rows_, cols_;
  std::vector<double> a_;
};

struct SimplexState {
  Tableau tab;
  std::vector<int> basis;
  std::vector<char> allowed;  // columns permitted to enter
  std::int64_t pivots = 0;
};

std::vector<double> reduced_costs(const SimplexState& s, const std::vector<double>& cost, double& value) {
  std::vector<double> reduced = cost;
  value = 0.0;
  for (int r = 0; r < s.tab.rows(); ++r) {
    const double cb = cost[s.basis[r]];
    if (cb == 0.0) continue;
    for (int c = 0; c < s.tab.cols(); ++c) reduced[c] -= cb * s.tab.at(r, c);
    value += cb * s.tab.rhs(r);
  }
  return reduced;
}

// Maximizes cost . z from the current basic feasible solution using Bland's rule.
void run_simplex(SimplexState& s, const std::vector<double>& cost, const SimplexOptions& opt) {
  double value = 0.0;
  auto reduced = reduced_costs(s, cost, value);
  while (true) {
    int enter = -1;
    for (int c = 0; c < s.tab.cols(); ++c) {
      if (s.allowed[c] && reduced[c] > opt.tolerance) {
        enter = c;
        break;
      }
    }
    if (enter < 0) return;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < s.tab.rows(); ++r) {
      const double coef = s.tab.at(r, enter);
      if (coef <= opt.tolerance) continue;
      const double ratio = std::max(0.0, s.tab.rhs(r)) / coef;
      if (ratio < best_ratio || (ratio == best_ratio && s.basis[r] < s.basis[leave])) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave < 0) throw LpError(LpError::Kind::Unbounded, "linear program is unbounded");
    if (++s.pivots > opt.max_pivots)
      throw LpError(LpError::Kind::IterationLimit, "simplex pivot limit exceeded");
    s.tab.pivot(leave, enter, reduced, value);
    s.basis[leave] = enter;
  }
}

}  // namespace

LpSolution solve_lp_max(const LinearProgram& lp, const SimplexOptions& opt) {
  const int nv = lp.variables();
  if (static_cast<int>(lp.bounds.size()) != nv)
    throw LpError(LpError::Kind::Malformed, "bounds must have one entry per variable");
  for (double c : lp.objective)
    if (!std::isfinite(c)) throw LpError(LpError::Kind::Malformed, "objective coefficients must be finite");
  for (const auto& [lo, hi] : lp.bounds)
    if (!std::isfinite(lo) || std::isnan(hi) || lo > hi)
      throw LpError(LpError::Kind::Malformed, "variable bounds must satisfy finite lo <= hi");

  // Shift x = lo + y, y >= 0; finite upper bounds become explicit rows.
  struct Row {
    std::vector<double> a;
    double b;
  };
  std::vector<Row> rows;
  rows.reserve(lp.constraints.size() + nv);
  for (const auto& c : lp.constraints) {
    if (static_cast<int>(c.coeffs.size()) != nv)
      throw LpError(LpError::Kind::Malformed, "constraint width must equal variable count");
    double b = c.bound;
    for (int k = 0; k < nv; ++k) {
      if (!std::isfinite(c.coeffs[k])) throw LpError(LpError::Kind::Malformed, "non-finite coefficient");
      b -= c.coeffs[k] * lp.bounds[k].first;
    }
    if (!std::isfinite(b)) throw LpError(LpError::Kind::Malformed, "non-finite bound");
    rows.push_back({c.coeffs, b});
  }
  for (int k = 0; k < nv; ++k) {
    const auto [lo, hi] = lp.bounds[k];
    if (std::isinf(hi)) continue;
    std::vector<double> a(nv, 0.0);
    a[k] = 1.0;
    rows.push_back({std::move(a), hi - lo});
  }

  const int nr = static_cast<int>(rows.size());
  int artificials = 0;
  for (const auto& r : rows)
    if (r.b < 0.0) ++artificials;
  const int slack0 = nv, art0 = nv + nr, ncols = nv + nr + artificials;

  SimplexState s{Tableau(nr, ncols), std::vector<int>(nr), std::vector<char>(ncols, 1), 0};
  int next_art = art0;
  for (int r = 0; r < nr; ++r) {
    const bool flip = rows[r].b < 0.0;
    const double sign = flip ? -1.0 : 1.0;
    for (int k = 0; k < nv; ++k) s.tab.at(r, k) = sign * rows[r].a[k];
    s.tab.at(r, slack0 + r) = sign;
    s.tab.rhs(r) = sign * rows[r].b;
    if (flip) {
      s.tab.at(r, next_art) = 1.0;
      s.basis[r] = next_art++;
    } else {
      s.basis[r] = slack0 + r;
    }
  }

  if (artificials > 0) {
    std::vector<double> phase1(ncols, 0.0);
    for (int c = art0; c < ncols; ++c) phase1[c] = -1.0;
    run_simplex(s, phase1, opt);
    double infeasibility = 0.0;
    for (int r = 0; r < nr; ++r)
      if (s.basis[r] >= art0) infeasibility += s.tab.rhs(r);
    if (infeasibility > kLpFeasibilityTol) throw LpError(LpError::Kind::Infeasible, "linear program is infeasible");
    // Drive zero-level artificials out of the basis where possible.
    std::vector<double> dummy(ncols, 0.0);
    double dummy_value = 0.0;
    for (int r = 0; r < nr; ++r) {
      if (s.basis[r] < art0) continue;
      for (int c = 0; c < art0; ++c) {
        if (std::abs(s.tab.at(r, c)) > opt.tolerance) {
          s.tab.pivot(r, c, dummy, dummy_value);
          s.basis[r] = c;
          break;
        }
      }
    }
    for (int c = art0; c < ncols; ++c) s.allowed[c] = 0;
  }

  std::vector<double> phase2(ncols, 0.0);
  for (int k = 0; k < nv; ++k) phase2[k] = lp.objective[k];
  run_simplex(s, phase2, opt);

  LpSolution sol;
  sol.pivots = s.pivots;
  sol.x.assign(nv, 0.0);
  for (int r = 0; r < nr; ++r)
    if (s.basis[r] < nv) sol.x[s.basis[r]] = std::max(0.0, s.tab.rhs(r));
  for (int k = 0; k < nv; ++k) {
    const auto [lo, hi] = lp.bounds[k];
    sol.x[k] = std::min(hi, lo + sol.x[k]);
  }
  for (int k = 0; k < nv; ++k) sol.value += lp.objective[k] * sol.x[k];
  return sol;
}

}  // namespace adslate
