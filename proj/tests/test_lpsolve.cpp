#include <cmath>
#include <limits>
#include <vector>

#include "adslate/lpsolve.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace adslate;
using testing::pick;

namespace {

// Solves the square system A x = b by Gaussian elimination; false when singular.
bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-12) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.resize(n);
  for (int c = 0; c < n; ++c) x[c] = b[c] / a[c][c];
  return true;
}

// Vertex enumeration: every choice of n tight rows among constraints and bounds.
double vertex_oracle(const LinearProgram& lp) {
  const int n = lp.variables();
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (const auto& c : lp.constraints) {
    rows.push_back(c.coeffs);
    rhs.push_back(c.bound);
  }
  for (int v = 0; v < n; ++v) {
    std::vector<double> e(n, 0.0);
    e[v] = 1.0;
    rows.push_back(e);
    rhs.push_back(lp.bounds[v].second);
    e[v] = -1.0;
    rows.push_back(e);
    rhs.push_back(-lp.bounds[v].first);
  }
  const int r = static_cast<int>(rows.size());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> pick_idx(n);
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      std::vector<std::vector<double>> a;
      std::vector<double> b;
      for (int k : pick_idx) {
        a.push_back(rows[k]);
        b.push_back(rhs[k]);
      }
      std::vector<double> x;
      if (!solve_square(a, b, x)) return;
      if (max_violation(lp, x) > 1e-9) return;
      double val = 0.0;
      for (int v = 0; v < n; ++v) val += lp.objective[v] * x[v];
      best = std::max(best, val);
      return;
    }
    for (int k = start; k < r; ++k) {
      pick_idx[depth] = k;
      self(self, k + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return best;
}

}  // namespace

TEST_CASE("simplex examples") {
  auto one = LinearProgram::unit_box({1.0});
  one.constraints.push_back({{1.0}, 1.0});
  CHECK(solve_lp_max(one).value == doctest::Approx(1.0));

  auto two = LinearProgram::unit_box({3.0, 5.0});
  two.constraints.push_back({{1.0, 1.0}, 1.0});
  const auto s = solve_lp_max(two);
  CHECK(s.value == doctest::Approx(5.0));
  CHECK(s.x[1] == doctest::Approx(1.0));
  CHECK(s.x[0] == doctest::Approx(0.0));

  auto zero = LinearProgram::unit_box({0.0, 0.0});
  zero.constraints.push_back({{1.0, 2.0}, 1.0});
  CHECK(solve_lp_max(zero).value == 0.0);
}

TEST_CASE("simplex error paths") {
  LinearProgram unbounded;
  unbounded.objective = {1.0};
  unbounded.bounds = {{0.0, std::numeric_limits<double>::infinity()}};
  try {
    solve_lp_max(unbounded);
    FAIL("expected unbounded");
  } catch (const LpError& e) {
    CHECK(e.kind() == LpError::Kind::Unbounded);
  }

  auto infeasible = LinearProgram::unit_box({1.0});
  infeasible.constraints.push_back({{-1.0}, -2.0});  // x >= 2
  try {
    solve_lp_max(infeasible);
    FAIL("expected infeasible");
  } catch (const LpError& e) {
    CHECK(e.kind() == LpError::Kind::Infeasible);
  }

  auto malformed = LinearProgram::unit_box({1.0, 1.0});
  malformed.constraints.push_back({{1.0}, 1.0});
  CHECK_THROWS_AS(solve_lp_max(malformed), LpError);

  auto capped = LinearProgram::unit_box({1.0, 1.0, 1.0});
  capped.constraints.push_back({{1.0, 1.0, 1.0}, 1.5});
  SimplexOptions opts;
  opts.max_pivots = 0;
  CHECK_THROWS_AS(solve_lp_max(capped, opts), LpError);
}

TEST_CASE("negative lower bounds and shifted boxes") {
  LinearProgram lp;
  lp.objective = {1.0, -1.0};
  lp.bounds = {{-1.0, 2.0}, {-3.0, 1.0}};
  lp.constraints.push_back({{1.0, 1.0}, 0.5});
  const auto s = solve_lp_max(lp);
  CHECK(s.value == doctest::Approx(vertex_oracle(lp)).epsilon(1e-9));
  CHECK(max_violation(lp, s.x) <= kLpFeasibilityTol);
}

TEST_CASE("property: simplex matches vertex enumeration on random bounded programs") {
  Rng rng = make_stream(31, 0);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = pick(rng, 1, 6), rows = pick(rng, 0, 5);
    std::vector<double> c(n);
    for (double& x : c) x = uniform(rng, -1.0, 2.0);
    auto lp = LinearProgram::unit_box(c);
    for (int r = 0; r < rows; ++r) {
      LinearConstraint con;
      con.coeffs.resize(n);
      for (double& a : con.coeffs) a = uniform_index(rng, 3) == 0 ? 0.0 : uniform(rng, -0.5, 1.0);
      con.bound = uniform(rng, 0.0, 2.0);  // x = 0 stays feasible
      lp.constraints.push_back(con);
    }
    const auto s = solve_lp_max(lp);
    CHECK(max_violation(lp, s.x) <= kLpFeasibilityTol);
    double val = 0.0;
    for (int v = 0; v < n; ++v) val += c[v] * s.x[v];
    CHECK(val == doctest::Approx(s.value).epsilon(1e-9));
    CHECK(std::abs(s.value - vertex_oracle(lp)) <= 1e-6);
  }
}

TEST_CASE("degenerate packing program terminates") {
  // many identical tight rows: Bland's rule must not cycle
  auto lp = LinearProgram::unit_box({1.0, 1.0, 1.0, 1.0});
  for (int r = 0; r < 8; ++r) lp.constraints.push_back({{1.0, 1.0, 1.0, 1.0}, 1.0});
  for (int r = 0; r < 4; ++r) lp.constraints.push_back({{1.0, 0.0, 1.0, 0.0}, 0.0});
  const auto s = solve_lp_max(lp);
  CHECK(s.value == doctest::Approx(1.0));
}
