#include "adslate/factorized.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "adslate/parallel.hpp"

namespace adslate {

namespace {

void require_value(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
}

}  // namespace

ValueDistribution ValueDistribution::point_mass(double v) {
  require_value(v, "point mass");
  ValueDistribution d;
  d.kind_ = Kind::PointMass;
  d.support_ = {v};
  d.probs_ = {1.0};
  d.cdf_ = {1.0};
  return d;
}

ValueDistribution ValueDistribution::uniform(double a, double b) {
  require_value(a, "uniform bound");
  require_value(b, "uniform bound");
  if (a > b) throw std::invalid_argument("uniform needs a <= b");
  ValueDistribution d;
  d.kind_ = Kind::Uniform;
  d.a_ = a;
  d.b_ = b;
  return d;
}

ValueDistribution ValueDistribution::discrete(std::vector<double> support, std::vector<double> probs) {
  if (support.empty() || support.size() != probs.size())
    throw std::invalid_argument("discrete law needs matching non-empty support and probabilities");
  double total = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    require_value(support[k], "support point");
    require_value(probs[k], "probability");
    total += probs[k];
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("probabilities must sum to 1");
  ValueDistribution d;
  d.kind_ = Kind::Discrete;
  d.support_ = std::move(support);
  d.probs_ = std::move(probs);
  d.cdf_.resize(d.probs_.size());
  std::partial_sum(d.probs_.begin(), d.probs_.end(), d.cdf_.begin());
  d.cdf_.back() = 1.0;
  return d;
}

ValueDistribution ValueDistribution::empirical(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical law needs samples");
  for (double s : samples) require_value(s, "sample");
  ValueDistribution d;
  d.kind_ = Kind::Empirical;
  const double p = 1.0 / static_cast<double>(samples.size());
  d.probs_.assign(samples.size(), p);
  d.support_ = std::move(samples);
  return d;
}

double ValueDistribution::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::PointMass: return support_[0];
    case Kind::Uniform: return adslate::uniform(rng, a_, b_);
    case Kind::Discrete: {
      const double u = uniform01(rng);
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      return support_[std::min<std::size_t>(it - cdf_.begin(), support_.size() - 1)];
    }
    case Kind::Empirical: return support_[uniform_index(rng, support_.size())];
  }
  return 0.0;
}

double ValueDistribution::mean() const {
  if (kind_ == Kind::Uniform) return 0.5 * (a_ + b_);
  double m = 0.0;
  for (std::size_t k = 0; k < support_.size(); ++k) m += support_[k] * probs_[k];
  return m;
}

const char* to_string(ValueDistribution::Kind kind) {
  switch (kind) {
    case ValueDistribution::Kind::PointMass: return "point";
    case ValueDistribution::Kind::Uniform: return "uniform";
    case ValueDistribution::Kind::Discrete: return "discrete";
    case ValueDistribution::Kind::Empirical: return "empirical";
  }
  return "?";
}

std::vector<double> sorted_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

std::vector<int> order_desc(const std::vector<double>& v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
  return idx;
}

double norm_f(const std::vector<double>& z, const std::vector<double>& w) {
  const auto zs = sorted_desc(z), ws = sorted_desc(w);
  double total = 0.0;
  for (std::size_t k = 0; k < zs.size() && k < ws.size(); ++k) total += zs[k] * ws[k];
  return total;
}

std::vector<double> quality_vector(const std::vector<int>& slots, const std::vector<double>& u, const Metric& metric) {
  std::vector<double> z(u.size(), 0.0);
  for (int j : slots) z[j] = u[j] * nn_discount(j, slots, metric);
  return z;
}

std::vector<double> weight_vector(const std::vector<int>& slots, const std::vector<double>& u) {
  std::vector<double> out(u.size(), 0.0);
  for (int j : slots) out[j] = u[j];
  return out;
}

SlotSelection make_selection(std::vector<int> slots, const std::vector<double>& u, const Metric& metric) {
  std::sort(slots.begin(), slots.end());
  if (std::adjacent_find(slots.begin(), slots.end()) != slots.end()) throw std::invalid_argument("repeated slot");
  for (int j : slots)
    if (j < 0 || j >= static_cast<int>(u.size())) throw std::invalid_argument("slot out of range");
  SlotSelection sel;
  sel.quality = quality_vector(slots, u, metric);
  sel.slots = std::move(slots);
  return sel;
}

SlotSelection select_slots_radius(const std::vector<double>& u, const Metric& metric, double r) {
  std::vector<int> kept;
  for (int j : order_desc(u)) {
    bool far = true;
    for (int k : kept)
      if (metric(j, k) < r) {
        far = false;
        break;
      }
    if (far) kept.push_back(j);
  }
  return make_selection(std::move(kept), u, metric);
}

FactorizedAssignment greedy_assign(const SlotSelection& sel, const std::vector<double>& w) {
  FactorizedAssignment out;
  out.quantity.assign(w.size(), 0.0);
  std::vector<double> selected_quality;
  for (int j : sel.slots) selected_quality.push_back(sel.quality[j]);
  const auto slot_rank = order_desc(selected_quality);
  const auto adv_rank = order_desc(w);
  const std::size_t pairs = std::min(sel.slots.size(), w.size());
  for (std::size_t k = 0; k < pairs; ++k) {
    const int i = adv_rank[k];
    const int j = sel.slots[slot_rank[k]];
    out.matching.pairs.emplace_back(i, j);
    out.quantity[i] = sel.quality[j];
    out.welfare += sel.quality[j] * w[i];
  }
  std::sort(out.matching.pairs.begin(), out.matching.pairs.end());
  return out;
}

int logm_levels(int m) {
  if (m < 1) return 0;
  const std::uint64_t target = static_cast<std::uint64_t>(m) * m;
  int L = 0;
  while ((std::uint64_t{1} << L) < target) ++L;
  return L;
}

double logm_radius(int level) { return std::ldexp(1.0, -level); }

FactorizedAssignment logm_allocate_level(const FactorizedInstance& inst, int level) {
  return greedy_assign(select_slots_radius(inst.u, inst.metric, logm_radius(level)), inst.w);
}

FactorizedAssignment logm_allocate(const FactorizedInstance& inst, Rng& rng) {
  const int L = logm_levels(inst.m());
  return logm_allocate_level(inst, static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(L) + 1)));
}

double logm_expected_welfare(const FactorizedInstance& inst) {
  const int L = logm_levels(inst.m());
  double total = 0.0;
  for (int l = 0; l <= L; ++l) total += logm_allocate_level(inst, l).welfare;
  return total / (L + 1);
}

EdgeCaseCheck edge_case_check(const FactorizedInstance& inst, const std::vector<int>& slots) {
  const int L = logm_levels(inst.m());
  EdgeCaseCheck out;
  out.parts.assign(std::max(L, 1) + 1, {});
  for (int j : slots) {
    const double nn = nn_discount(j, slots, inst.metric);
    int band = std::max(L, 1);
    for (int l = 1; l < L; ++l)
      if (nn > logm_radius(l) && nn <= logm_radius(l - 1)) {
        band = l;
        break;
      }
    out.parts[band].push_back(j);
  }
  const auto& tail = out.parts[std::max(L, 1)];
  out.lhs = norm_f(weight_vector(tail, inst.u), inst.w) * std::ldexp(1.0, 1 - L);
  out.rhs = 4.0 * norm_f(select_slots_radius(inst.u, inst.metric, 1.0).quality, inst.w);
  return out;
}

std::vector<double> draw_values(const std::vector<ValueDistribution>& dists, Rng& rng) {
  std::vector<double> w(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) w[i] = dists[i].sample(rng);
  return w;
}

namespace {

std::optional<std::vector<double>> exact_gamma(const std::vector<ValueDistribution>& dists, std::int64_t limit) {
  std::int64_t outcomes = 1;
  for (const auto& d : dists) {
    if (!d.atomic()) return std::nullopt;
    outcomes *= static_cast<std::int64_t>(d.support().size());
    if (outcomes > limit) return std::nullopt;
  }
  const std::size_t n = dists.size();
  std::vector<double> gamma(n, 0.0), draw(n);
  std::vector<std::size_t> digit(n, 0);
  for (std::int64_t t = 0; t < outcomes; ++t) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      draw[i] = dists[i].support()[digit[i]];
      p *= dists[i].probs()[digit[i]];
    }
    const auto sorted = sorted_desc(draw);
    for (std::size_t k = 0; k < n; ++k) gamma[k] += p * sorted[k];
    for (std::size_t i = 0; i < n; ++i) {
      if (++digit[i] < dists[i].support().size()) break;
      digit[i] = 0;
    }
  }
  return gamma;
}

template <class Reducer>
std::vector<double> gamma_impl(const std::vector<ValueDistribution>& dists, std::int64_t samples, std::uint64_t seed,
                               std::int64_t exact_limit, Reducer&& reduce) {
  if (auto exact = exact_gamma(dists, exact_limit)) return *exact;
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  auto sum = reduce(samples, dists.size(), [&](std::int64_t t, std::vector<double>& acc) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(t));
    const auto sorted = sorted_desc(draw_values(dists, rng));
    for (std::size_t k = 0; k < sorted.size(); ++k) acc[k] += sorted[k];
  });
  for (double& g : sum) g /= static_cast<double>(samples);
  return sum;
}

}  // namespace

std::vector<double> gamma_order_stats(const std::vector<ValueDistribution>& dists, std::int64_t samples,
                                      std::uint64_t seed, std::int64_t exact_limit) {
  return gamma_impl(dists, samples, seed, exact_limit, [](auto count, auto width, auto&& body) {
    return parallel::block_vector_sum(count, width, body);
  });
}

std::vector<double> gamma_order_stats_serial(const std::vector<ValueDistribution>& dists, std::int64_t samples,
                                             std::uint64_t seed, std::int64_t exact_limit) {
  return gamma_impl(dists, samples, seed, exact_limit, [](auto count, auto width, auto&& body) {
    return parallel::block_vector_sum_serial(count, width, body);
  });
}

namespace {

Instance surrogate_instance(const StochasticInstance& inst, const std::vector<double>& gamma) {
  const int n = inst.n(), m = inst.m();
  std::vector<double> values(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) values[static_cast<std::size_t>(i) * m + j] = inst.u[j] * gamma[i];
  return Instance(n, m, std::move(values), inst.metric, DiscountModel::NearestNeighbor);
}

}  // namespace

StochasticMechanism::StochasticMechanism(StochasticInstance inst, std::int64_t gamma_samples, std::uint64_t gamma_seed)
    : inst_(std::move(inst)),
      gamma_(gamma_order_stats(inst_.dists, gamma_samples, gamma_seed)),
      allocator_(surrogate_instance(inst_, gamma_)) {}

SlotSelection StochasticMechanism::preselect(Rng& rng) const {
  const auto outcome = allocator_.allocate(rng, ConversionMode::Plain);
  return make_selection(outcome.allocation.matching.occupied_slots(), inst_.u, inst_.metric);
}

FactorizedAssignment StochasticMechanism::allocate(Rng& rng, const std::vector<double>& w) const {
  if (static_cast<int>(w.size()) != inst_.n()) throw std::invalid_argument("one value per advertiser expected");
  return greedy_assign(preselect(rng), w);
}

VectorNorm ordered_norm(std::vector<double> z) {
  return [z = sorted_desc(std::move(z))](const std::vector<double>& w) { return norm_f(z, w); };
}

VectorNorm g_norm(const std::vector<int>& slots, const std::vector<double>& u, const Metric& metric) {
  return ordered_norm(quality_vector(slots, u, metric));
}

VectorNorm h_norm(const std::vector<double>& u, const Metric& metric) {
  const int m = static_cast<int>(u.size());
  if (m > 20) throw std::invalid_argument("h enumerates slot subsets; m must be <= 20");
  std::vector<std::vector<double>> qualities;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> slots;
    for (int j = 0; j < m; ++j)
      if (mask >> j & 1u) slots.push_back(j);
    qualities.push_back(sorted_desc(quality_vector(slots, u, metric)));
  }
  return [qualities = std::move(qualities)](const std::vector<double>& w) {
    double best = 0.0;
    for (const auto& z : qualities) best = std::max(best, norm_f(z, w));
    return best;
  };
}

NormSandwich empirical_norm_sandwich(const std::vector<ValueDistribution>& dists, const VectorNorm& norm,
                                     std::int64_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  const std::size_t n = dists.size();
  auto sum = parallel::block_vector_sum(samples, n + 1, [&](std::int64_t t, std::vector<double>& acc) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(t));
    const auto w = draw_values(dists, rng);
    const auto sorted = sorted_desc(w);
    for (std::size_t k = 0; k < n; ++k) acc[k] += sorted[k];
    acc[n] += norm(w);
  });
  for (double& s : sum) s /= static_cast<double>(samples);
  NormSandwich out;
  out.mean_of = sum[n];
  sum.pop_back();
  out.at_mean = norm(sum);
  return out;
}

int bid_rank(const std::vector<double>& bids, int i, double b) {
  int rank = 0;
  for (int j = 0; j < static_cast<int>(bids.size()); ++j) {
    if (j == i) continue;
    if (bids[j] > b || (bids[j] == b && j < i)) ++rank;
  }
  return rank;
}

double step_quantity(const SlotSelection& sel, const std::vector<double>& bids, int i, double b) {
  std::vector<double> q;
  for (int j : sel.slots) q.push_back(sel.quality[j]);
  q = sorted_desc(std::move(q));
  const int rank = bid_rank(bids, i, b);
  return rank < static_cast<int>(q.size()) ? q[rank] : 0.0;
}

double factorized_payment(const SlotSelection& sel, const std::vector<double>& bids, int i) {
  const double b = bids.at(i);
  std::vector<double> cuts{0.0};
  for (int j = 0; j < static_cast<int>(bids.size()); ++j)
    if (j != i && bids[j] > 0.0 && bids[j] < b) cuts.push_back(bids[j]);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    area += (cuts[k + 1] - cuts[k]) * step_quantity(sel, bids, i, 0.5 * (cuts[k] + cuts[k + 1]));
  return b * step_quantity(sel, bids, i, b) - area;
}

}  // namespace adslate
