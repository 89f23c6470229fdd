#include "adslate/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace adslate::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string array(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ", ";
    s += format_double(v[k]);
  }
  return s + "]";
}

std::string matrix(const std::vector<std::vector<double>>& rows, const std::string& indent) {
  if (rows.empty()) return "[]";
  std::string s = "[\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    s += indent + "  " + array(rows[r]);
    s += r + 1 < rows.size() ? ",\n" : "\n";
  }
  return s + indent + "]";
}

std::string quote(const std::string& s) { return json(s).dump(); }

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad field '") + key + "': " + e.what());
  }
}

Metric metric_from(const json& j) {
  if (!j.contains("metric")) throw std::invalid_argument("missing field 'metric'");
  return Metric(field<std::vector<std::vector<double>>>(j.at("metric"), "dist"));
}

std::string metric_block(const Metric& metric) {
  return "\"metric\": {\n    \"dist\": " + matrix(metric.table(), "    ") + "\n  }";
}

std::string distribution_json(const ValueDistribution& d) {
  switch (d.kind()) {
    case ValueDistribution::Kind::PointMass:
      return "{\"kind\": \"point\", \"value\": " + format_double(d.support()[0]) + "}";
    case ValueDistribution::Kind::Uniform:
      return "{\"kind\": \"uniform\", \"a\": " + format_double(d.lo()) + ", \"b\": " + format_double(d.hi()) + "}";
    case ValueDistribution::Kind::Discrete:
      return "{\"kind\": \"discrete\", \"support\": " + array(d.support()) + ", \"probs\": " + array(d.probs()) + "}";
    case ValueDistribution::Kind::Empirical:
      return "{\"kind\": \"empirical\", \"samples\": " + array(d.support()) + "}";
  }
  return "{}";
}

ValueDistribution distribution_from(const json& j) {
  const auto kind = field<std::string>(j, "kind");
  if (kind == "point") return ValueDistribution::point_mass(field<double>(j, "value"));
  if (kind == "uniform") return ValueDistribution::uniform(field<double>(j, "a"), field<double>(j, "b"));
  if (kind == "discrete")
    return ValueDistribution::discrete(field<std::vector<double>>(j, "support"), field<std::vector<double>>(j, "probs"));
  if (kind == "empirical") return ValueDistribution::empirical(field<std::vector<double>>(j, "samples"));
  throw std::invalid_argument("unknown distribution kind '" + kind + "'");
}

std::string distributions_block(const std::vector<ValueDistribution>& dists, const std::string& indent) {
  if (dists.empty()) return "[]";
  std::string s = "[\n";
  for (std::size_t k = 0; k < dists.size(); ++k) {
    s += indent + "  " + distribution_json(dists[k]);
    s += k + 1 < dists.size() ? ",\n" : "\n";
  }
  return s + indent + "]";
}

}  // namespace

std::string instance_to_json(const Instance& instance) {
  std::vector<std::vector<double>> rows(instance.n(), std::vector<double>(instance.m()));
  for (int i = 0; i < instance.n(); ++i)
    for (int j = 0; j < instance.m(); ++j) rows[i][j] = instance.value(i, j);
  std::string s = "{\n";
  s += "  \"n\": " + std::to_string(instance.n()) + ",\n";
  s += "  \"m\": " + std::to_string(instance.m()) + ",\n";
  s += "  \"model\": " + quote(to_string(instance.model())) + ",\n";
  s += "  \"values\": " + matrix(rows, "  ") + ",\n";
  s += "  " + metric_block(instance.metric()) + "\n}\n";
  return s;
}

Instance instance_from_json(const std::string& text) {
  const auto j = parse(text);
  const int n = field<int>(j, "n"), m = field<int>(j, "m");
  const auto rows = field<std::vector<std::vector<double>>>(j, "values");
  if (static_cast<int>(rows.size()) != n) throw std::invalid_argument("values must have n rows");
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != m) throw std::invalid_argument("values rows must have m entries");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  const auto model = j.contains("model") ? parse_model(field<std::string>(j, "model")) : DiscountModel::NearestNeighbor;
  return Instance(n, m, std::move(flat), metric_from(j), model);
}

std::string factorized_to_json(const FactorizedInstance& inst) {
  std::string s = "{\n";
  s += "  \"u\": " + array(inst.u) + ",\n";
  s += "  \"w\": " + array(inst.w) + ",\n";
  s += "  " + metric_block(inst.metric) + "\n}\n";
  return s;
}

FactorizedInstance factorized_from_json(const std::string& text) {
  const auto j = parse(text);
  FactorizedInstance inst{field<std::vector<double>>(j, "u"), field<std::vector<double>>(j, "w"), metric_from(j)};
  inst.to_instance();  // validates shapes, values and metric
  return inst;
}

std::string stochastic_to_json(const StochasticInstance& inst) {
  std::string s = "{\n";
  s += "  \"u\": " + array(inst.u) + ",\n";
  s += "  \"distributions\": " + distributions_block(inst.dists, "  ") + ",\n";
  s += "  " + metric_block(inst.metric) + "\n}\n";
  return s;
}

StochasticInstance stochastic_from_json(const std::string& text) {
  const auto j = parse(text);
  StochasticInstance inst;
  inst.u = field<std::vector<double>>(j, "u");
  if (!j.contains("distributions")) throw std::invalid_argument("missing field 'distributions'");
  for (const auto& d : j.at("distributions")) inst.dists.push_back(distribution_from(d));
  inst.metric = metric_from(j);
  if (inst.metric.size() != inst.m()) throw std::invalid_argument("metric size must equal the number of slots");
  if (auto report = validate_metric(inst.metric); !report.ok()) throw std::invalid_argument(report.describe());
  return inst;
}

std::string distributions_to_json(const std::vector<ValueDistribution>& dists) {
  return distributions_block(dists, "") + "\n";
}

std::vector<ValueDistribution> distributions_from_json(const std::string& text) {
  const auto j = parse(text);
  const json& list = j.is_object() ? j.at("distributions") : j;
  std::vector<ValueDistribution> out;
  for (const auto& d : list) out.push_back(distribution_from(d));
  return out;
}

std::string points_to_json(const std::vector<Point2>& points) {
  std::vector<std::vector<double>> rows;
  for (auto p : points) rows.push_back({p.x, p.y});
  return "{\n  \"points\": " + matrix(rows, "  ") + "\n}\n";
}

std::vector<Point2> points_from_json(const std::string& text) {
  const auto j = parse(text);
  const auto rows = j.is_object() ? field<std::vector<std::vector<double>>>(j, "points")
                                  : j.get<std::vector<std::vector<double>>>();
  std::vector<Point2> out;
  for (const auto& r : rows) {
    if (r.size() != 2) throw std::invalid_argument("points must be [x, y] pairs");
    out.push_back({r[0], r[1]});
  }
  return out;
}

std::vector<double> doubles_from_json(const std::string& text) {
  const auto j = parse(text);
  try {
    return j.get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("expected a JSON array of numbers: ") + e.what());
  }
}

std::string graph_to_edge_list(const Graph& graph) {
  std::string s = std::to_string(graph.vertices()) + " " + std::to_string(graph.edges().size()) + "\n";
  for (auto [a, b] : graph.edges()) s += std::to_string(a) + " " + std::to_string(b) + "\n";
  return s;
}

Graph graph_from_edge_list(const std::string& text) {
  std::istringstream in(text);
  int n = 0;
  std::size_t m = 0;
  if (!(in >> n >> m)) throw std::invalid_argument("edge list must start with 'n m'");
  std::vector<std::pair<int, int>> edges;
  for (std::size_t k = 0; k < m; ++k) {
    int a, b;
    if (!(in >> a >> b)) throw std::invalid_argument("edge list ended after " + std::to_string(k) + " edges");
    edges.emplace_back(a, b);
  }
  return Graph(n, std::move(edges));
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

}  // namespace adslate::io
