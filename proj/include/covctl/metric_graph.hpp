#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace covctl {

using VertexId = int;

struct WeightedEdge {
  VertexId u{};
  VertexId v{};
  double cost{};
};

// Cost applied to a travel distance before it enters the objective. Both
// choices are subadditive, so composing them with a shortest-path metric
// yields another metric.
enum class Sensing { identity, square_root };

double sensing_cost(Sensing f, double distance);
Sensing sensing_from_name(std::string_view name);
std::string sensing_name(Sensing f);

// Weighted vertices plus a dense symmetric shortest-path cost matrix.
// Instances are immutable after construction and always satisfy:
//   cost(u,u) == 0, cost(u,v) == cost(v,u),
//   cost(u,v) <= cost(u,z) + cost(z,v)  (relative tolerance 1e-9).
class MetricGraph {
 public:
  MetricGraph() = default;

  // Validates the metric axioms and weight nonnegativity before returning.
  static MetricGraph from_cost_matrix(std::vector<double> weights, std::vector<double> cost,
                                      std::optional<std::vector<WeightedEdge>> edge_list = std::nullopt);

  int vertex_count() const { return n_; }
  double weight(VertexId v) const { return weights_[static_cast<std::size_t>(v)]; }
  const std::vector<double>& weights() const { return weights_; }
  double cost(VertexId u, VertexId v) const {
    return cost_[static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v)];
  }
  const std::vector<double>& cost_matrix() const { return cost_; }

  bool has_edge_list() const { return edges_.has_value(); }
  const std::vector<WeightedEdge>& edge_list() const;

  double total_weight() const;
  // Smallest strictly positive vertex weight; 0 when all weights vanish.
  double min_positive_weight() const;
  // Smallest strictly positive pairwise cost; 0 when the matrix is all zero.
  double min_positive_cost() const;
  double max_cost() const;

  nlohmann::ordered_json to_json() const;
  // Rebuilds the instance from vertices + edges; the shortest-path closure is
  // recomputed from the edge list, never trusted from the document.
  static MetricGraph from_json(const nlohmann::json& doc);

 private:
  int n_ = 0;
  std::vector<double> weights_;
  std::vector<double> cost_;
  std::optional<std::vector<WeightedEdge>> edges_;
};

// All-pairs shortest-path closure of a positively weighted undirected graph.
// Rejects nonpositive edge costs, invalid endpoints and disconnected inputs
// (the error names an unreachable vertex pair).
MetricGraph metric_closure(int vertex_count, const std::vector<WeightedEdge>& edges, std::vector<double> weights);

// Splits every listed edge (u,v) at a zero-weight midpoint z so that
// cost(u,z) == cost(z,v) == cost(u,v)/2. Pairwise costs between original
// vertices are preserved exactly; requires an explicit edge list.
MetricGraph subdivide_edges(const MetricGraph& g);

}  // namespace covctl
