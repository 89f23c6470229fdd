#include "adslate/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <stdexcept>

#include "adslate/io.hpp"
#include "adslate/oracle.hpp"
#include "json.hpp"

namespace adslate {

Metric normalized_metric(const std::vector<Point2>& points) {
  const int m = static_cast<int>(points.size());
  std::vector<double> d(static_cast<std::size_t>(m) * m, 0.0);
  double diam = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) diam = std::max(diam, euclidean(points[a], points[b]));
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      const double v = diam > 0.0 ? euclidean(points[a], points[b]) / diam : 0.0;
      d[static_cast<std::size_t>(a) * m + b] = d[static_cast<std::size_t>(b) * m + a] = v;
    }
  return Metric(m, std::move(d));
}

EuclideanLayout gen_euclidean(int m, double box, Rng& rng) {
  if (m < 1) throw std::invalid_argument("need at least one slot");
  EuclideanLayout out;
  for (int j = 0; j < m; ++j) {
    const double x = uniform(rng, 0.0, box);
    const double y = uniform(rng, 0.0, box);
    out.points.push_back({x, y});
  }
  out.metric = normalized_metric(out.points);
  return out;
}

Metric metric_closure(const Metric& table) {
  const int m = table.size();
  auto d = table.table();
  for (int k = 0; k < m; ++k)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) d[a][b] = std::min(d[a][b], d[a][k] + d[k][b]);
  return Metric(std::move(d));
}

Metric gen_random_metric(int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("need at least one point");
  std::vector<double> w(static_cast<std::size_t>(m) * m, 0.0);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      w[static_cast<std::size_t>(a) * m + b] = w[static_cast<std::size_t>(b) * m + a] = uniform(rng, 0.05, 1.0);
  auto closed = metric_closure(Metric(m, std::move(w))).flat();
  const double diam = *std::max_element(closed.begin(), closed.end());
  if (diam > 0.0)
    for (double& x : closed) x /= diam;
  return Metric(m, std::move(closed));
}

const char* to_string(MetricKind kind) { return kind == MetricKind::Euclidean ? "euclidean" : "general"; }

MetricKind parse_metric_kind(const std::string& s) {
  if (s == "euclidean") return MetricKind::Euclidean;
  if (s == "general") return MetricKind::General;
  throw std::invalid_argument("unknown metric kind '" + s + "' (expected euclidean|general)");
}

Instance gen_nn_instance(int n, int m, const Metric& metric, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(n) * m);
  for (double& x : v) x = uniform01(rng);
  return Instance(n, m, std::move(v), metric, DiscountModel::NearestNeighbor);
}

FactorizedInstance gen_factorized(int n, const Metric& metric, Rng& rng) {
  FactorizedInstance f;
  f.metric = metric;
  for (int j = 0; j < metric.size(); ++j) f.u.push_back(uniform01(rng));
  for (int i = 0; i < n; ++i) f.w.push_back(uniform01(rng));
  return f;
}

Instance gen_unit_instance(int n, const Metric& metric, Rng& rng) {
  const int m = metric.size();
  std::vector<double> u(m);
  for (double& x : u) x = uniform01(rng);
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.insert(v.end(), u.begin(), u.end());
  return Instance(n, m, std::move(v), metric, DiscountModel::NearestNeighbor);
}

GpdsInstance gen_gpds(int points, int disks, int groups, Rng& rng) {
  if (points < 1 || groups < 1) throw std::invalid_argument("need points and groups");
  GpdsInstance g;
  g.metric = gen_random_metric(points, rng);
  g.groups.resize(groups);
  for (int d = 0; d < disks; ++d) {
    PseudoDisk disk;
    disk.center = static_cast<int>(uniform_index(rng, points));
    disk.radius = uniform01(rng);
    disk.weight = uniform01(rng);
    g.groups[uniform_index(rng, groups)].push_back(d);
    g.disks.push_back(disk);
  }
  return g;
}

Graph gen_graph(int vertices, double p, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < vertices; ++a)
    for (int b = a + 1; b < vertices; ++b)
      if (uniform01(rng) < p) edges.emplace_back(a, b);
  return Graph(vertices, std::move(edges));
}

std::vector<ValueDistribution> gen_distributions(int n, Rng& rng) {
  std::vector<ValueDistribution> out;
  for (int i = 0; i < n; ++i) {
    switch (uniform_index(rng, 4)) {
      case 0: out.push_back(ValueDistribution::point_mass(uniform01(rng))); break;
      case 1: {
        const double a = uniform01(rng), b = uniform01(rng);
        out.push_back(ValueDistribution::uniform(std::min(a, b), std::max(a, b)));
        break;
      }
      case 2: {
        const int k = 2 + static_cast<int>(uniform_index(rng, 3));
        std::vector<double> support(k), probs(k);
        double total = 0.0;
        for (int t = 0; t < k; ++t) {
          support[t] = uniform01(rng);
          probs[t] = 0.1 + uniform01(rng);
          total += probs[t];
        }
        for (double& p : probs) p /= total;
        out.push_back(ValueDistribution::discrete(std::move(support), std::move(probs)));
        break;
      }
      default: {
        std::vector<double> samples(5);
        for (double& s : samples) s = uniform01(rng) * uniform01(rng);
        out.push_back(ValueDistribution::empirical(std::move(samples)));
        break;
      }
    }
  }
  return out;
}

std::string config_to_json(const ExperimentConfig& c) {
  std::string algos = "[";
  for (std::size_t k = 0; k < c.algorithms.size(); ++k) {
    if (k) algos += ", ";
    algos += nlohmann::json(c.algorithms[k]).dump();
  }
  algos += "]";
  std::string s = "{\n";
  s += "  \"generator\": " + nlohmann::json(c.generator).dump() + ",\n";
  s += "  \"metric\": " + nlohmann::json(c.metric).dump() + ",\n";
  s += "  \"n\": " + std::to_string(c.n) + ",\n";
  s += "  \"m\": " + std::to_string(c.m) + ",\n";
  s += "  \"instances\": " + std::to_string(c.instances) + ",\n";
  s += "  \"seed\": " + std::to_string(c.seed) + ",\n";
  s += "  \"algorithms\": " + algos + ",\n";
  s += "  \"trials\": " + std::to_string(c.trials) + ",\n";
  s += "  \"eps\": " + io::format_double(c.eps) + ",\n";
  s += "  \"oracle_cap\": " + std::to_string(c.oracle_cap) + ",\n";
  s += std::string("  \"timing\": ") + (c.timing ? "true" : "false") + "\n}\n";
  return s;
}

ExperimentConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  ExperimentConfig c;
  try {
    c.generator = j.value("generator", c.generator);
    c.metric = j.value("metric", c.metric);
    c.n = j.value("n", c.n);
    c.m = j.value("m", c.m);
    c.instances = j.value("instances", c.instances);
    c.seed = j.value("seed", c.seed);
    c.algorithms = j.value("algorithms", c.algorithms);
    c.trials = j.value("trials", c.trials);
    c.eps = j.value("eps", c.eps);
    c.oracle_cap = j.value("oracle_cap", c.oracle_cap);
    c.timing = j.value("timing", c.timing);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad config field: ") + e.what());
  }
  if (c.n < 0 || c.m < 1 || c.instances < 0 || c.trials < 1) throw std::invalid_argument("config sizes out of range");
  parse_metric_kind(c.metric);
  if (c.generator != "nn" && c.generator != "factorized" && c.generator != "unit")
    throw std::invalid_argument("unknown generator '" + c.generator + "'");
  return c;
}

GeneratedInstance generate_instance(const ExperimentConfig& config, int id) {
  Rng rng = make_stream(config.seed, static_cast<std::uint64_t>(id));
  GeneratedInstance g;
  Metric metric;
  if (parse_metric_kind(config.metric) == MetricKind::Euclidean) {
    auto layout = gen_euclidean(config.m, 1.0, rng);
    g.points = std::move(layout.points);
    metric = std::move(layout.metric);
  } else {
    metric = gen_random_metric(config.m, rng);
  }
  if (config.generator == "nn") {
    g.instance = gen_nn_instance(config.n, config.m, metric, rng);
  } else if (config.generator == "factorized") {
    g.factorized = gen_factorized(config.n, metric, rng);
    g.instance = g.factorized->to_instance();
  } else {
    g.instance = gen_unit_instance(config.n, metric, rng);
    FactorizedInstance f;
    f.metric = metric;
    for (int j = 0; j < config.m; ++j) f.u.push_back(config.n > 0 ? g.instance.value(0, j) : 0.0);
    f.w.assign(config.n, 1.0);
    g.factorized = std::move(f);
  }
  return g;
}

namespace {

double run_algorithm(const std::string& algo, const GeneratedInstance& g, const ExperimentConfig& config,
                     std::uint64_t seed) {
  const Instance& inst = g.instance;
  if (algo == "oracle") {
    OracleOptions opt;
    opt.max_points = config.oracle_cap;
    opt.parallel = false;
    return optimal_allocation(inst, opt).value;
  }
  if (algo == "nn-lp" || algo == "nn-lp-plain") {
    const NnLpAllocator alloc(inst);
    const auto mode = algo == "nn-lp" ? ConversionMode::Virtual : ConversionMode::Plain;
    return alloc.mean_welfare_serial(config.trials, seed, mode);
  }
  if (algo == "logm") {
    if (!g.factorized) throw std::invalid_argument("logm needs a factorized instance");
    return logm_expected_welfare(*g.factorized);
  }
  if (algo == "ptas") {
    if (config.generator != "unit" || g.points.empty())
      throw std::invalid_argument("ptas needs unit values on a euclidean layout");
    PtasOptions opt;
    opt.parallel = false;
    return ptas_allocate(inst, g.points, config.eps, opt).welfare;
  }
  if (algo == "single-slot") {
    if (inst.n() == 0) return 0.0;
    return social_welfare(single_slot_baseline(inst), inst);
  }
  throw std::invalid_argument("unknown algorithm '" + algo + "'");
}

}  // namespace

std::vector<ReportRow> run_experiment(const ExperimentConfig& config) {
  const int per = static_cast<int>(config.algorithms.size());
  const int total = config.instances * per;
  std::vector<ReportRow> rows(total);
  std::vector<std::optional<double>> opts(config.instances);
  const bool want_opt = config.m <= config.oracle_cap;

#pragma omp parallel for schedule(dynamic, 1)
  for (int id = 0; id < config.instances; ++id) {
    GeneratedInstance g;
    std::string gen_error;
    try {
      g = generate_instance(config, id);
    } catch (const std::exception& e) {
      gen_error = e.what();
    }
    const std::uint64_t seed = stream_seed(config.seed, static_cast<std::uint64_t>(id));
    if (gen_error.empty() && want_opt) {
      try {
        OracleOptions opt;
        opt.max_points = config.oracle_cap;
        opt.parallel = false;
        opts[id] = optimal_allocation(g.instance, opt).value;
      } catch (const std::exception&) {
        opts[id].reset();
      }
    }
    for (int a = 0; a < per; ++a) {
      ReportRow& row = rows[static_cast<std::size_t>(id) * per + a];
      row.instance_id = id;
      row.algo = config.algorithms[a];
      row.seed = seed;
      row.opt = opts[id];
      if (!gen_error.empty()) {
        row.error = gen_error;
        continue;
      }
      try {
        const auto start = std::chrono::steady_clock::now();
        row.sw = run_algorithm(row.algo, g, config, seed);
        if (config.timing)
          row.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (row.opt && *row.opt > 0.0) row.ratio = *row.sw / *row.opt;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  }
  return rows;
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); };
  auto clean = [](std::string s) {
    for (char& c : s)
      if (c == ',' || c == '\n' || c == '"') c = ' ';
    return s;
  };
  out << "instance_id,algo,seed,sw,opt,ratio,millis,error\n";
  for (const auto& r : rows)
    out << r.instance_id << ',' << r.algo << ',' << r.seed << ',' << opt(r.sw) << ',' << opt(r.opt) << ','
        << opt(r.ratio) << ',' << opt(r.millis) << ',' << clean(r.error) << '\n';
}

std::uint64_t default_seed(std::uint64_t fallback) {
  if (const char* env = std::getenv("ADSLATE_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && end != env) return v;
    throw std::invalid_argument("ADSLATE_SEED must be a non-negative integer");
  }
  return fallback;
}

}  // namespace adslate
