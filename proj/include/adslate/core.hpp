#pragma once

// Instances, metrics, discount functions and welfare for ad-slate allocation
// with spatial externalities.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace adslate {

/// Finite metric over slot points, stored as a dense row-major table.
/// The constructor only checks shape and finiteness; use validate_metric()
/// for the metric axioms.
class Metric {
 public:
  Metric() = default;
  explicit Metric(std::vector<std::vector<double>> table);
  Metric(int size, std::vector<double> flat);

  static Metric single_point() { return Metric(1, {0.0}); }

  int size() const { return size_; }
  double operator()(int a, int b) const { return dist_[static_cast<std::size_t>(a) * size_ + b]; }
  const std::vector<double>& flat() const { return dist_; }
  std::vector<std::vector<double>> table() const;
  double diameter() const;

  friend bool operator==(const Metric&, const Metric&) = default;

 private:
  int size_ = 0;
  std::vector<double> dist_;
};

enum class ViolationKind { NonzeroDiagonal, Negative, Asymmetric, ExceedsDiameter, Triangle };

/// For Triangle: dist(a,b) > dist(a,c) + dist(c,b) + slack, with lhs/rhs the two sides.
struct MetricViolation {
  ViolationKind kind;
  int a = 0, b = 0, c = -1;
  double lhs = 0.0, rhs = 0.0;
};

struct MetricReport {
  std::vector<MetricViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

inline constexpr double kDefaultMetricSlack = 1e-9;

MetricReport validate_metric(const Metric& metric, double slack = kDefaultMetricSlack);

enum class DiscountModel { NearestNeighbor, ProductDistance };

const char* to_string(DiscountModel model);
DiscountModel parse_model(const std::string& s);

/// Nearest-neighbour discount: 1 for a singleton, else distance to the closest other slot in S.
double nn_discount(int slot, std::span<const int> occupied, const Metric& metric);
/// Product-distance discount: 1 for a singleton, else the product of distances to the rest of S.
double pd_discount(int slot, std::span<const int> occupied, const Metric& metric);
double discount(DiscountModel model, int slot, std::span<const int> occupied, const Metric& metric);

/// n advertisers x m slots with baseline values v(i,j) >= 0 over a validated metric.
class Instance {
 public:
  Instance() = default;
  Instance(int n, int m, std::vector<double> values, Metric metric, DiscountModel model);
  Instance(std::vector<std::vector<double>> values, Metric metric, DiscountModel model);

  int n() const { return n_; }
  int m() const { return m_; }
  double value(int i, int j) const { return values_[static_cast<std::size_t>(i) * m_ + j]; }
  const std::vector<double>& values() const { return values_; }
  const Metric& metric() const { return metric_; }
  DiscountModel model() const { return model_; }

  /// Copy with advertiser i's value row multiplied by `scale`.
  Instance with_scaled_row(int i, double scale) const;
  /// Copy with one value replaced.
  Instance with_value(int i, int j, double v) const;

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<double> values_;
  Metric metric_;
  DiscountModel model_ = DiscountModel::NearestNeighbor;
};

/// Advertiser-to-slot pairs; each advertiser and each slot at most once.
struct Matching {
  std::vector<std::pair<int, int>> pairs;

  bool empty() const { return pairs.empty(); }
  std::size_t size() const { return pairs.size(); }
  /// S(M), sorted ascending.
  std::vector<int> occupied_slots() const;
  /// Empty string when feasible, otherwise a reason.
  std::string infeasibility(int n, int m) const;
  bool feasible(int n, int m) const { return infeasibility(n, m).empty(); }
};

double social_welfare(const Matching& matching, const Instance& instance);

/// Welfare when `occupied` (a superset of S(M)) is displayed, e.g. slots
/// filled by zero-value padding advertisers.
double social_welfare_with_occupied(const Matching& matching, std::span<const int> occupied,
                                    const Instance& instance);

/// Chosen disk indices (ascending) and their total weight.
struct Selection {
  std::vector<int> chosen;
  double value = 0.0;
};

/// Valuation v(i,j) = w_i * u_j over a metric. Nearest-neighbour model.
struct FactorizedInstance {
  std::vector<double> u;  // slot weights
  std::vector<double> w;  // advertiser values
  Metric metric;

  int m() const { return static_cast<int>(u.size()); }
  int n() const { return static_cast<int>(w.size()); }
  Instance to_instance() const;
};

}  // namespace adslate
