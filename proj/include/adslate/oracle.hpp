#pragma once

// Exhaustive solvers used to certify the approximation algorithms on small inputs.

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "adslate/core.hpp"
#include "adslate/gpds.hpp"
#include "adslate/proddist.hpp"
#include "adslate/ptas.hpp"

namespace adslate {

class OracleCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  int max_points = 22;
  bool parallel = true;
};

struct AssignmentResult {
  std::vector<std::pair<int, int>> pairs;  // (row, column)
  double value = 0.0;
};

/// Maximum-weight partial matching of rows to columns. Pairs with weight <= 0 are left out.
AssignmentResult max_weight_matching(const std::vector<std::vector<double>>& weights);

/// Every row matched to a distinct column (rows <= columns), maximizing total weight.
AssignmentResult max_weight_row_assignment(const std::vector<std::vector<double>>& weights);

struct AllocationOracleResult {
  Matching best;
  double value = 0.0;
  std::int64_t explored = 0;
};

/// Exact welfare maximizer: for every slot subset S with |S| <= n the discounts
/// are fixed, leaving an assignment problem. Ties go to the lexicographically
/// smallest slot set.
AllocationOracleResult optimal_allocation(const Instance& instance, const OracleOptions& options = {});
AllocationOracleResult optimal_allocation_serial(const Instance& instance, const OracleOptions& options = {});

struct SelectionOracleResult {
  Selection best;
  std::int64_t explored = 0;
};

SelectionOracleResult optimal_gpds(const GpdsInstance& gpds, GpdsConstraint constraint,
                                   const OracleOptions& options = {});

/// Best feasible disk selection within the budget, restricted to disks with
/// allowed[d] != 0 when `allowed` is non-empty.
SelectionOracleResult optimal_wds(const WdsInstance& wds, const std::vector<char>& allowed = {},
                                  const OracleOptions& options = {});

struct VertexSetResult {
  std::vector<int> best;
  double value = 0.0;
  std::int64_t explored = 0;
};

VertexSetResult optimal_msed(const Graph& graph, const OracleOptions& options = {});
VertexSetResult optimal_msed_serial(const Graph& graph, const OracleOptions& options = {});
VertexSetResult maximum_independent_set(const Graph& graph, const OracleOptions& options = {});

}  // namespace adslate
