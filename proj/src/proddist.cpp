#include "adslate/proddist.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "adslate/oracle.hpp"

namespace adslate {

Graph::Graph(int vertices, std::vector<std::pair<int, int>> edges) : vertices_(vertices) {
  if (vertices < 0 || vertices > 64) throw std::invalid_argument("graph must have 0..64 vertices");
  adj_.assign(vertices, 0);
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= vertices || b >= vertices)
      throw std::invalid_argument("edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
    if (a == b) throw std::invalid_argument("self-loop at vertex " + std::to_string(a));
    if (a > b) std::swap(a, b);
    edges_.emplace_back(a, b);
    adj_[a] |= std::uint64_t{1} << b;
    adj_[b] |= std::uint64_t{1} << a;
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

Matching single_slot_baseline(const Instance& instance) {
  if (instance.n() == 0 || instance.m() == 0) throw std::invalid_argument("baseline needs an advertiser and a slot");
  int bi = 0, bj = 0;
  for (int i = 0; i < instance.n(); ++i)
    for (int j = 0; j < instance.m(); ++j)
      if (instance.value(i, j) > instance.value(bi, bj)) {
        bi = i;
        bj = j;
      }
  Matching m;
  m.pairs.emplace_back(bi, bj);
  return m;
}

namespace {

std::uint64_t to_mask(const Graph& graph, const std::vector<int>& subset) {
  std::uint64_t mask = 0;
  for (int v : subset) {
    if (v < 0 || v >= graph.vertices()) throw std::invalid_argument("vertex out of range");
    mask |= std::uint64_t{1} << v;
  }
  return mask;
}

int degree_in(const Graph& graph, int v, std::uint64_t mask) { return std::popcount(graph.neighbours(v) & mask); }

double rho_mask(const Graph& graph, std::uint64_t mask) {
  double total = 0.0;
  for (int v = 0; v < graph.vertices(); ++v)
    if (mask >> v & 1u) total += std::ldexp(1.0, -degree_in(graph, v, mask));
  return total;
}

}  // namespace

double msed_objective(const Graph& graph, const std::vector<int>& subset) {
  return rho_mask(graph, to_mask(graph, subset));
}

Refinement refine_to_independent_set(const Graph& graph, std::vector<int> subset) {
  std::uint64_t mask = to_mask(graph, subset);
  Refinement out;
  while (true) {
    const auto it = std::find_if(graph.edges().begin(), graph.edges().end(),
                                 [&](auto e) { return (mask >> e.first & 1u) && (mask >> e.second & 1u); });
    if (it == graph.edges().end()) break;
    const auto [a, b] = *it;
    const int da = degree_in(graph, a, mask), db = degree_in(graph, b, mask);
    const int drop = da > db ? a : b;  // b > a, so ties also drop b
    RefinementStep step{drop, rho_mask(graph, mask), 0.0};
    mask &= ~(std::uint64_t{1} << drop);
    step.after = rho_mask(graph, mask);
    if (step.after < step.before) throw std::logic_error("refinement decreased the objective");
    out.steps.push_back(step);
  }
  for (int v = 0; v < graph.vertices(); ++v)
    if (mask >> v & 1u) out.independent.push_back(v);
  return out;
}

Instance mis_to_pd_instance(const Graph& graph) {
  const int n = graph.vertices();
  if (n < 1) throw std::invalid_argument("graph needs at least one vertex");
  std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) dist[static_cast<std::size_t>(a) * n + b] = graph.adjacent(a, b) ? 0.5 : 1.0;
  return Instance(n, n, std::vector<double>(static_cast<std::size_t>(n) * n, 1.0), Metric(n, std::move(dist)),
                  DiscountModel::ProductDistance);
}

std::vector<int> pd_matching_to_msed_subset(const Matching& matching, const Graph& graph) {
  const auto instance = mis_to_pd_instance(graph);
  const double sw = social_welfare(matching, instance);
  auto subset = matching.occupied_slots();
  const double rho = msed_objective(graph, subset);
  if (rho != sw) throw std::logic_error("welfare and exponential-degree objective disagree");
  return subset;
}

PdAllocator oracle_pd_allocator() {
  return [](const Instance& inst) { return optimal_allocation(inst).best; };
}

PdAllocator single_slot_pd_allocator() {
  return [](const Instance& inst) { return single_slot_baseline(inst); };
}

HardnessReport hardness_demo(const Graph& graph, const PdAllocator& allocator) {
  HardnessReport r;
  const auto instance = mis_to_pd_instance(graph);
  r.matching = allocator(instance);
  r.welfare = social_welfare(r.matching, instance);
  r.subset = pd_matching_to_msed_subset(r.matching, graph);
  r.objective = msed_objective(graph, r.subset);
  r.refinement = refine_to_independent_set(graph, r.subset);
  r.independent_size = static_cast<int>(r.refinement.independent.size());
  r.mis_size = static_cast<int>(maximum_independent_set(graph).best.size());
  return r;
}

}  // namespace adslate
