#include "adslate/gpds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "adslate/parallel.hpp"

namespace adslate {

std::vector<int> GpdsInstance::group_of() const {
  std::vector<int> owner(disks.size(), -1);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int d : groups[g]) owner[d] = static_cast<int>(g);
  return owner;
}

void GpdsInstance::validate() const {
  std::vector<int> seen(disks.size(), 0);
  for (const auto& g : groups)
    for (int d : g) {
      if (d < 0 || d >= size()) throw std::invalid_argument("group references unknown disk");
      ++seen[d];
    }
  for (int count : seen)
    if (count != 1) throw std::invalid_argument("groups must partition the disks");
  for (const auto& disk : disks) {
    if (disk.center < 0 || disk.center >= metric.size()) throw std::invalid_argument("disk center outside metric");
    if (!(disk.radius >= 0.0) || !(disk.weight >= 0.0)) throw std::invalid_argument("negative disk radius or weight");
  }
}

std::string gpds_infeasibility(const GpdsInstance& gpds, const std::vector<int>& chosen, GpdsConstraint constraint) {
  const auto owner = gpds.group_of();
  std::vector<char> group_used(gpds.groups.size(), 0);
  for (int d : chosen) {
    if (d < 0 || d >= gpds.size()) return "unknown disk " + std::to_string(d);
    if (owner[d] < 0) return "disk " + std::to_string(d) + " has no group";
    if (group_used[owner[d]]) return "two disks from group " + std::to_string(owner[d]);
    group_used[owner[d]] = 1;
  }
  if (constraint == GpdsConstraint::CenterFree) {
    for (int a : chosen)
      for (int b : chosen)
        if (a != b && gpds.covers(a, gpds.disks[b].center))
          return "center of disk " + std::to_string(b) + " covered by disk " + std::to_string(a);
  } else {
    for (int p = 0; p < gpds.metric.size(); ++p) {
      int count = 0;
      for (int d : chosen) count += gpds.covers(d, p) ? 1 : 0;
      if (count > 1) return "point " + std::to_string(p) + " covered " + std::to_string(count) + " times";
    }
  }
  return {};
}

double selection_value(const GpdsInstance& gpds, const std::vector<int>& chosen) {
  double total = 0.0;
  for (int d : chosen) total += gpds.disks[d].weight;
  return total;
}

GpdsInstance reduce_nn_to_gpds(const Instance& instance) {
  if (instance.model() != DiscountModel::NearestNeighbor)
    throw std::invalid_argument("pseudo-disk reduction requires the nearest-neighbour model");
  GpdsInstance gpds;
  gpds.metric = instance.metric();
  const int n = instance.n(), m = instance.m();
  gpds.groups.resize(n);
  if (m < 2) return gpds;
  gpds.disks.reserve(static_cast<std::size_t>(n) * m * (m - 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      for (int jp = 0; jp < m; ++jp) {
        if (jp == j) continue;
        const double d = instance.metric()(j, jp);
        gpds.groups[i].push_back(gpds.size());
        gpds.disks.push_back({j, d / 2.0, instance.value(i, j) * d, i, j, jp});
      }
  return gpds;
}

LpRelaxation build_lp_relax(const GpdsInstance& gpds) {
  LpRelaxation relax;
  std::vector<int> var_of_disk(gpds.disks.size(), -1);
  std::vector<double> objective;
  for (int d = 0; d < gpds.size(); ++d) {
    if (gpds.disks[d].weight > 0.0) {
      var_of_disk[d] = static_cast<int>(relax.disk_of_var.size());
      relax.disk_of_var.push_back(d);
      objective.push_back(gpds.disks[d].weight);
    }
  }
  const std::size_t nv = relax.disk_of_var.size();
  relax.lp = LinearProgram::unit_box(std::move(objective));

  for (int p = 0; p < gpds.metric.size(); ++p) {
    LinearConstraint row{std::vector<double>(nv, 0.0), 1.0};
    bool any = false;
    for (std::size_t v = 0; v < nv; ++v) {
      if (gpds.covers(relax.disk_of_var[v], p)) {
        row.coeffs[v] = 1.0;
        any = true;
      }
    }
    if (any) relax.lp.constraints.push_back(std::move(row));
  }
  for (const auto& group : gpds.groups) {
    LinearConstraint row{std::vector<double>(nv, 0.0), 1.0};
    bool any = false;
    for (int d : group) {
      if (var_of_disk[d] >= 0) {
        row.coeffs[var_of_disk[d]] = 1.0;
        any = true;
      }
    }
    if (any) relax.lp.constraints.push_back(std::move(row));
  }
  return relax;
}

RelaxedSolution solve_lp_relax(const GpdsInstance& gpds) {
  const auto relax = build_lp_relax(gpds);
  RelaxedSolution out;
  out.xstar.assign(gpds.disks.size(), 0.0);
  if (relax.disk_of_var.empty()) return out;
  const auto sol = solve_lp_max(relax.lp);
  for (std::size_t v = 0; v < relax.disk_of_var.size(); ++v) out.xstar[relax.disk_of_var[v]] = sol.x[v];
  out.objective = sol.value;
  return out;
}

RoundingPlan::RoundingPlan(const GpdsInstance& gpds, std::vector<double> xstar) : xstar_(std::move(xstar)) {
  const int n = gpds.size();
  if (static_cast<int>(xstar_.size()) != n) throw std::invalid_argument("x* must have one entry per disk");
  for (double& x : xstar_) {
    if (!(x >= -kLpFeasibilityTol && x <= 1.0 + kLpFeasibilityTol))
      throw std::invalid_argument("x* entries must lie in [0,1]");
    x = std::clamp(x, 0.0, 1.0);
  }
  const auto owner = gpds.group_of();
  conflicts_.resize(n);
  denominator_.assign(n, 1.0);
  admission_.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int ci = gpds.disks[i].center;
    for (int k = 0; k < n; ++k) {
      if (k == i || xstar_[k] == 0.0) continue;
      if (owner[k] == owner[i] || gpds.covers(k, ci)) {
        conflicts_[i].push_back(k);
        denominator_[i] *= 1.0 - xstar_[k] / 3.0;
      }
    }
    if (denominator_[i] < 1.0 / 3.0 - kLpFeasibilityTol)
      throw std::logic_error("rounding denominator below 1/3 for disk " + std::to_string(i) +
                             ": x* violates the relaxation");
    admission_[i] = std::min(1.0, (1.0 / 3.0) / denominator_[i]);
  }
}

void RoundingPlan::round_into(Rng& rng, std::vector<char>& in_first, std::vector<char>& selected) const {
  const int n = size();
  in_first.assign(n, 0);
  selected.assign(n, 0);
  for (int i = 0; i < n; ++i) in_first[i] = uniform01(rng) < xstar_[i] / 3.0;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    if (!in_first[i]) continue;
    bool blocked = false;
    for (int k : conflicts_[i]) {
      if (in_first[k]) {
        blocked = true;
        break;
      }
    }
    if (!blocked && u < admission_[i]) selected[i] = 1;
  }
}

std::vector<int> RoundingPlan::round(Rng& rng) const {
  std::vector<char> first, selected;
  round_into(rng, first, selected);
  std::vector<int> chosen;
  for (int i = 0; i < size(); ++i)
    if (selected[i]) chosen.push_back(i);
  return chosen;
}

Selection round_lp(const GpdsInstance& gpds, const std::vector<double>& xstar, Rng& rng) {
  const RoundingPlan plan(gpds, xstar);
  Selection sel;
  sel.chosen = plan.round(rng);
  sel.value = selection_value(gpds, sel.chosen);
  return sel;
}

std::vector<double> inclusion_frequencies(const RoundingPlan& plan, std::int64_t trials, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(plan.size());
  auto counts = parallel::block_vector_sum(trials, n, [&](std::int64_t t, std::vector<double>& acc) {
    thread_local std::vector<char> first, selected;
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(t));
    plan.round_into(rng, first, selected);
    for (std::size_t i = 0; i < n; ++i) acc[i] += selected[i];
  });
  for (double& c : counts) c /= static_cast<double>(trials);
  return counts;
}

std::vector<double> inclusion_frequencies_serial(const RoundingPlan& plan, std::int64_t trials, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(plan.size());
  std::vector<char> first, selected;
  auto counts = parallel::block_vector_sum_serial(trials, n, [&](std::int64_t t, std::vector<double>& acc) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(t));
    plan.round_into(rng, first, selected);
    for (std::size_t i = 0; i < n; ++i) acc[i] += selected[i];
  });
  for (double& c : counts) c /= static_cast<double>(trials);
  return counts;
}

const char* to_string(ConversionMode mode) { return mode == ConversionMode::Plain ? "plain" : "virtual"; }

ConversionMode parse_conversion_mode(const std::string& s) {
  if (s == "plain") return ConversionMode::Plain;
  if (s == "virtual") return ConversionMode::Virtual;
  throw std::invalid_argument("unknown mode '" + s + "' (expected plain|virtual)");
}

ConvertedAllocation selection_to_matching(const Selection& sel, const GpdsInstance& gpds, const Instance& instance,
                                          ConversionMode mode) {
  if (auto why = gpds_infeasibility(gpds, sel.chosen, GpdsConstraint::CenterFree); !why.empty())
    throw std::invalid_argument("infeasible selection: " + why);
  ConvertedAllocation out;
  for (int d : sel.chosen) {
    const auto& disk = gpds.disks[d];
    if (disk.advertiser < 0 || disk.slot < 0 || disk.partner < 0)
      throw std::invalid_argument("selection contains a disk without an originating triple");
    out.matching.pairs.emplace_back(disk.advertiser, disk.slot);
  }
  if (auto why = out.matching.infeasibility(instance.n(), instance.m()); !why.empty())
    throw std::invalid_argument("infeasible selection: " + why);
  if (mode == ConversionMode::Plain) return out;

  // One pendant point per chosen disk at half the pair distance from its slot;
  // all other distances follow shortest paths through the parent slot, capped at 1.
  const int n = instance.n(), m = instance.m(), k = static_cast<int>(sel.chosen.size());
  const int m2 = m + k, n2 = n + k;
  std::vector<int> parent(m2);
  std::vector<double> offset(m2, 0.0);
  std::iota(parent.begin(), parent.begin() + m, 0);
  for (int t = 0; t < k; ++t) {
    const auto& disk = gpds.disks[sel.chosen[t]];
    parent[m + t] = disk.slot;
    offset[m + t] = instance.metric()(disk.slot, disk.partner) / 2.0;
  }
  std::vector<double> dist(static_cast<std::size_t>(m2) * m2, 0.0);
  for (int a = 0; a < m2; ++a)
    for (int b = a + 1; b < m2; ++b) {
      double d;
      if (a < m && b < m) {
        d = instance.metric()(a, b);
      } else {
        d = instance.metric()(parent[a], parent[b]) + offset[a] + offset[b];
        d = std::min(d, 1.0);
      }
      dist[static_cast<std::size_t>(a) * m2 + b] = dist[static_cast<std::size_t>(b) * m2 + a] = d;
    }
  std::vector<double> values(static_cast<std::size_t>(n2) * m2, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) values[static_cast<std::size_t>(i) * m2 + j] = instance.value(i, j);
  out.extended.emplace(n2, m2, std::move(values), Metric(m2, std::move(dist)), DiscountModel::NearestNeighbor);
  for (int t = 0; t < k; ++t) out.matching.pairs.emplace_back(n + t, m + t);
  return out;
}

NnLpAllocator::NnLpAllocator(const Instance& instance) : instance_(instance) {
  if (instance.model() != DiscountModel::NearestNeighbor)
    throw std::invalid_argument("LP allocator requires the nearest-neighbour model");
  if (single_slot()) return;
  gpds_ = reduce_nn_to_gpds(instance_);
  relaxed_ = solve_lp_relax(gpds_);
  plan_.emplace(gpds_, relaxed_.xstar);
}

NnLpAllocator::Outcome NnLpAllocator::allocate(Rng& rng, ConversionMode mode) const {
  Outcome out;
  if (single_slot()) {
    int best = -1;
    for (int i = 0; i < instance_.n(); ++i)
      if (best < 0 || instance_.value(i, 0) > instance_.value(best, 0)) best = i;
    if (best >= 0) out.allocation.matching.pairs.emplace_back(best, 0);
    out.welfare = social_welfare(out.allocation.matching, instance_);
    return out;
  }
  out.selection.chosen = plan_->round(rng);
  out.selection.value = selection_value(gpds_, out.selection.chosen);
  out.allocation = selection_to_matching(out.selection, gpds_, instance_, mode);
  out.welfare = out.allocation.welfare(instance_);
  return out;
}

double NnLpAllocator::trial_welfare(std::uint64_t seed, std::int64_t t, ConversionMode mode) const {
  Rng rng = make_stream(seed, static_cast<std::uint64_t>(t));
  return allocate(rng, mode).welfare;
}

double NnLpAllocator::mean_welfare(std::int64_t trials, std::uint64_t seed, ConversionMode mode) const {
  return parallel::block_sum(trials, [&](std::int64_t t) { return trial_welfare(seed, t, mode); }) /
         static_cast<double>(trials);
}

double NnLpAllocator::mean_welfare_serial(std::int64_t trials, std::uint64_t seed, ConversionMode mode) const {
  return parallel::block_sum_serial(trials, [&](std::int64_t t) { return trial_welfare(seed, t, mode); }) /
         static_cast<double>(trials);
}

double NnLpAllocator::expected_virtual_welfare() const {
  if (single_slot()) {
    double best = 0.0;
    for (int i = 0; i < instance_.n(); ++i) best = std::max(best, instance_.value(i, 0));
    return best;
  }
  double total = 0.0;
  for (int d = 0; d < gpds_.size(); ++d) total += (relaxed_.xstar[d] / 9.0) * (gpds_.disks[d].weight / 2.0);
  return total;
}

NnLpAllocator::Outcome nn_constant_approx(const Instance& instance, Rng& rng, ConversionMode mode) {
  return NnLpAllocator(instance).allocate(rng, mode);
}

}  // namespace adslate
