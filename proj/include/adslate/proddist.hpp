#pragma once

// Product-distance model: the lone-slot baseline and the executable reduction
// chain from maximum independent set through exponential-degree sums.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "adslate/core.hpp"

namespace adslate {

/// Simple undirected graph. Edges are stored once as (u < v), sorted.
class Graph {
 public:
  Graph() = default;
  Graph(int vertices, std::vector<std::pair<int, int>> edges);

  int vertices() const { return vertices_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  bool adjacent(int a, int b) const { return adj_[a] >> b & 1u; }
  /// Neighbour bitmask of a vertex (graphs up to 64 vertices).
  std::uint64_t neighbours(int v) const { return adj_[v]; }

 private:
  int vertices_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::uint64_t> adj_;
};

/// The pair (i, j) with the largest value, first in row-major order on ties.
Matching single_slot_baseline(const Instance& instance);

/// sum over i in U of 0.5^deg_U(i).
double msed_objective(const Graph& graph, const std::vector<int>& subset);

struct RefinementStep {
  int removed = -1;
  double before = 0.0;
  double after = 0.0;
};

struct Refinement {
  std::vector<int> independent;  // sorted
  std::vector<RefinementStep> steps;
};

/// Repeatedly takes the first internal edge in sorted order and drops its
/// higher-degree endpoint (higher index on ties). Throws std::logic_error if the
/// objective ever drops.
Refinement refine_to_independent_set(const Graph& graph, std::vector<int> subset);

/// n = m = |V|, unit values, distance 1/2 across edges and 1 otherwise.
Instance mis_to_pd_instance(const Graph& graph);

/// Occupied slots read back as vertices. Throws std::logic_error unless the
/// objective of the subset equals the matching's welfare exactly.
std::vector<int> pd_matching_to_msed_subset(const Matching& matching, const Graph& graph);

using PdAllocator = std::function<Matching(const Instance&)>;

PdAllocator oracle_pd_allocator();
PdAllocator single_slot_pd_allocator();

struct HardnessReport {
  Matching matching;
  double welfare = 0.0;
  std::vector<int> subset;
  double objective = 0.0;
  Refinement refinement;
  int independent_size = 0;
  int mis_size = 0;
};

HardnessReport hardness_demo(const Graph& graph, const PdAllocator& allocator);

}  // namespace adslate
