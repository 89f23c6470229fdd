#include "adslate/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace adslate {

Metric::Metric(std::vector<std::vector<double>> table) : size_(static_cast<int>(table.size())) {
  dist_.reserve(table.size() * table.size());
  for (const auto& row : table) {
    if (row.size() != table.size()) throw std::invalid_argument("metric table must be square");
    for (double d : row) {
      if (!std::isfinite(d)) throw std::invalid_argument("metric distances must be finite");
      dist_.push_back(d);
    }
  }
}

Metric::Metric(int size, std::vector<double> flat) : size_(size), dist_(std::move(flat)) {
  if (size < 0 || dist_.size() != static_cast<std::size_t>(size) * size)
    throw std::invalid_argument("metric table must be square");
  for (double d : dist_)
    if (!std::isfinite(d)) throw std::invalid_argument("metric distances must be finite");
}

std::vector<std::vector<double>> Metric::table() const {
  std::vector<std::vector<double>> t(size_, std::vector<double>(size_));
  for (int a = 0; a < size_; ++a)
    for (int b = 0; b < size_; ++b) t[a][b] = (*this)(a, b);
  return t;
}

double Metric::diameter() const {
  double best = 0.0;
  for (double d : dist_) best = std::max(best, d);
  return best;
}

std::string MetricReport::describe() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    switch (v.kind) {
      case ViolationKind::NonzeroDiagonal: os << "d(" << v.a << "," << v.a << ") != 0"; break;
      case ViolationKind::Negative: os << "d(" << v.a << "," << v.b << ") < 0"; break;
      case ViolationKind::Asymmetric: os << "d(" << v.a << "," << v.b << ") != d(" << v.b << "," << v.a << ")"; break;
      case ViolationKind::ExceedsDiameter: os << "d(" << v.a << "," << v.b << ") = " << v.lhs << " > 1"; break;
      case ViolationKind::Triangle:
        os << "triangle (" << v.a << "," << v.b << "," << v.c << "): " << v.lhs << " > " << v.rhs;
        break;
    }
    os << "\n";
  }
  return os.str();
}

MetricReport validate_metric(const Metric& metric, double slack) {
  MetricReport report;
  const int m = metric.size();
  for (int a = 0; a < m; ++a) {
    if (metric(a, a) != 0.0) report.violations.push_back({ViolationKind::NonzeroDiagonal, a, a, -1, metric(a, a), 0.0});
    for (int b = 0; b < m; ++b) {
      if (a == b) continue;
      if (metric(a, b) < 0.0) report.violations.push_back({ViolationKind::Negative, a, b, -1, metric(a, b), 0.0});
      if (a < b && metric(a, b) != metric(b, a))
        report.violations.push_back({ViolationKind::Asymmetric, a, b, -1, metric(a, b), metric(b, a)});
      if (a < b && metric(a, b) > 1.0 + slack)
        report.violations.push_back({ViolationKind::ExceedsDiameter, a, b, -1, metric(a, b), 1.0});
    }
  }
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        if (c == a || c == b) continue;
        const double rhs = metric(a, c) + metric(c, b);
        if (metric(a, b) > rhs + slack)
          report.violations.push_back({ViolationKind::Triangle, a, b, c, metric(a, b), rhs});
      }
  return report;
}

const char* to_string(DiscountModel model) {
  return model == DiscountModel::NearestNeighbor ? "nn" : "pd";
}

DiscountModel parse_model(const std::string& s) {
  if (s == "nn") return DiscountModel::NearestNeighbor;
  if (s == "pd") return DiscountModel::ProductDistance;
  throw std::invalid_argument("unknown model '" + s + "' (expected nn|pd)");
}

namespace {

void require_member(int slot, std::span<const int> occupied) {
  if (std::find(occupied.begin(), occupied.end(), slot) == occupied.end())
    throw std::invalid_argument("slot " + std::to_string(slot) + " is not in the occupied set");
}

}  // namespace

double nn_discount(int slot, std::span<const int> occupied, const Metric& metric) {
  require_member(slot, occupied);
  double best = 1.0;
  bool alone = true;
  for (int other : occupied) {
    if (other == slot) continue;
    if (alone) {
      best = metric(slot, other);
      alone = false;
    } else {
      best = std::min(best, metric(slot, other));
    }
  }
  return best;
}

double pd_discount(int slot, std::span<const int> occupied, const Metric& metric) {
  require_member(slot, occupied);
  double product = 1.0;
  for (int other : occupied)
    if (other != slot) product *= metric(slot, other);
  return product;
}

double discount(DiscountModel model, int slot, std::span<const int> occupied, const Metric& metric) {
  return model == DiscountModel::NearestNeighbor ? nn_discount(slot, occupied, metric)
                                                 : pd_discount(slot, occupied, metric);
}

Instance::Instance(int n, int m, std::vector<double> values, Metric metric, DiscountModel model)
    : n_(n), m_(m), values_(std::move(values)), metric_(std::move(metric)), model_(model) {
  if (n < 0 || m < 0) throw std::invalid_argument("negative instance dimensions");
  if (values_.size() != static_cast<std::size_t>(n) * m)
    throw std::invalid_argument("value table must be n x m");
  if (metric_.size() != m) throw std::invalid_argument("metric size must equal slot count");
  for (double v : values_)
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("values must be finite and non-negative");
  const auto report = validate_metric(metric_);
  if (!report.ok()) throw std::invalid_argument("invalid metric: " + report.describe());
}

namespace {

std::vector<double> flatten(const std::vector<std::vector<double>>& rows, int& n, int& m) {
  n = static_cast<int>(rows.size());
  m = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(n) * m);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != m) throw std::invalid_argument("ragged value table");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return flat;
}

}  // namespace

Instance::Instance(std::vector<std::vector<double>> values, Metric metric, DiscountModel model) {
  int n = 0, m = 0;
  auto flat = flatten(values, n, m);
  if (n == 0) m = metric.size();
  *this = Instance(n, m, std::move(flat), std::move(metric), model);
}

Instance Instance::with_scaled_row(int i, double scale) const {
  Instance copy = *this;
  for (int j = 0; j < m_; ++j) copy.values_[static_cast<std::size_t>(i) * m_ + j] *= scale;
  return copy;
}

Instance Instance::with_value(int i, int j, double v) const {
  if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("values must be finite and non-negative");
  Instance copy = *this;
  copy.values_[static_cast<std::size_t>(i) * m_ + j] = v;
  return copy;
}

std::vector<int> Matching::occupied_slots() const {
  std::vector<int> slots;
  slots.reserve(pairs.size());
  for (const auto& [i, j] : pairs) slots.push_back(j);
  std::sort(slots.begin(), slots.end());
  return slots;
}

std::string Matching::infeasibility(int n, int m) const {
  std::vector<char> ad_used(std::max(n, 0), 0), slot_used(std::max(m, 0), 0);
  for (const auto& [i, j] : pairs) {
    if (i < 0 || i >= n) return "advertiser " + std::to_string(i) + " out of range";
    if (j < 0 || j >= m) return "slot " + std::to_string(j) + " out of range";
    if (ad_used[i]) return "advertiser " + std::to_string(i) + " matched twice";
    if (slot_used[j]) return "slot " + std::to_string(j) + " matched twice";
    ad_used[i] = slot_used[j] = 1;
  }
  return {};
}

double social_welfare(const Matching& matching, const Instance& instance) {
  const auto occupied = matching.occupied_slots();
  return social_welfare_with_occupied(matching, occupied, instance);
}

double social_welfare_with_occupied(const Matching& matching, std::span<const int> occupied,
                                    const Instance& instance) {
  if (auto why = matching.infeasibility(instance.n(), instance.m()); !why.empty())
    throw std::invalid_argument("infeasible matching: " + why);
  double total = 0.0;
  for (const auto& [i, j] : matching.pairs)
    total += instance.value(i, j) * discount(instance.model(), j, occupied, instance.metric());
  return total;
}

Instance FactorizedInstance::to_instance() const {
  std::vector<double> values;
  values.reserve(w.size() * u.size());
  for (double wi : w)
    for (double uj : u) values.push_back(wi * uj);
  return Instance(n(), m(), std::move(values), metric, DiscountModel::NearestNeighbor);
}

}  // namespace adslate
