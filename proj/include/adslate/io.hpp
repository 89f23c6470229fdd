#pragma once

// JSON and edge-list serialization. Output uses a fixed field order and
// 17 significant digits, so write -> read -> write is byte-identical.

#include <iosfwd>
#include <string>
#include <vector>

#include "adslate/core.hpp"
#include "adslate/factorized.hpp"
#include "adslate/proddist.hpp"
#include "adslate/ptas.hpp"

namespace adslate::io {

std::string format_double(double v);  // %.17g

std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);

std::string factorized_to_json(const FactorizedInstance& inst);
FactorizedInstance factorized_from_json(const std::string& text);

std::string stochastic_to_json(const StochasticInstance& inst);
StochasticInstance stochastic_from_json(const std::string& text);

std::string distributions_to_json(const std::vector<ValueDistribution>& dists);
std::vector<ValueDistribution> distributions_from_json(const std::string& text);

std::string points_to_json(const std::vector<Point2>& points);
std::vector<Point2> points_from_json(const std::string& text);

std::vector<double> doubles_from_json(const std::string& text);

/// First line "n m", then one "u v" pair per line, 0-indexed.
std::string graph_to_edge_list(const Graph& graph);
Graph graph_from_edge_list(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace adslate::io
