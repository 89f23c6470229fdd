#pragma once

// Random instance generators and the seeded experiment runner.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adslate/core.hpp"
#include "adslate/factorized.hpp"
#include "adslate/gpds.hpp"
#include "adslate/proddist.hpp"
#include "adslate/ptas.hpp"
#include "adslate/random.hpp"

namespace adslate {

struct EuclideanLayout {
  std::vector<Point2> points;
  Metric metric;  // distances divided by the diameter
};

/// Uniform points in [0, box]^2.
EuclideanLayout gen_euclidean(int m, double box, Rng& rng);
/// Pairwise distances of `points` divided by their diameter.
Metric normalized_metric(const std::vector<Point2>& points);

/// Shortest-path closure of a symmetric non-negative table.
Metric metric_closure(const Metric& table);
/// Random symmetric weights in [0.05, 1], closed under shortest paths and
/// rescaled to diameter 1.
Metric gen_random_metric(int m, Rng& rng);

enum class MetricKind { Euclidean, General };
const char* to_string(MetricKind kind);
MetricKind parse_metric_kind(const std::string& s);

/// Values uniform on [0, 1].
Instance gen_nn_instance(int n, int m, const Metric& metric, Rng& rng);
FactorizedInstance gen_factorized(int n, const Metric& metric, Rng& rng);
/// v(i,j) = u_j with u uniform on [0, 1].
Instance gen_unit_instance(int n, const Metric& metric, Rng& rng);
/// Random pseudo-disks over a small general metric, `disks` in total.
GpdsInstance gen_gpds(int points, int disks, int groups, Rng& rng);
/// Erdos-Renyi G(v, p).
Graph gen_graph(int vertices, double p, Rng& rng);
/// Mix of point, uniform, discrete and empirical laws on [0, 1].
std::vector<ValueDistribution> gen_distributions(int n, Rng& rng);

struct ExperimentConfig {
  std::string generator = "nn";          // nn | factorized | unit
  std::string metric = "euclidean";      // euclidean | general
  int n = 4;
  int m = 4;
  int instances = 10;
  std::uint64_t seed = 1;
  std::vector<std::string> algorithms;   // oracle | nn-lp | nn-lp-plain | logm | ptas | single-slot
  std::int64_t trials = 1000;
  double eps = 0.5;
  int oracle_cap = 22;
  bool timing = false;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

struct ReportRow {
  int instance_id = 0;
  std::string algo;
  std::uint64_t seed = 0;
  std::optional<double> sw;
  std::optional<double> opt;
  std::optional<double> ratio;
  std::optional<double> millis;
  std::string error;
};

struct GeneratedInstance {
  Instance instance;
  std::optional<FactorizedInstance> factorized;
  std::vector<Point2> points;
};

GeneratedInstance generate_instance(const ExperimentConfig& config, int id);

/// Rows in config order; per-row failures are recorded in `error`.
std::vector<ReportRow> run_experiment(const ExperimentConfig& config);

/// Columns instance_id, algo, seed, sw, opt, ratio, millis, error; 12 significant digits.
void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);
std::string csv_number(double v);

/// Seed from ADSLATE_SEED when set, else `fallback`.
std::uint64_t default_seed(std::uint64_t fallback = 1);

}  // namespace adslate
