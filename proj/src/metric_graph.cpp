#include "covctl/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "covctl/rng.hpp"

namespace covctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string pair_str(VertexId u, VertexId v) { return "(" + std::to_string(u) + ", " + std::to_string(v) + ")"; }

// Triangle slack proportional to the magnitudes involved; absorbs the
// floating-point noise of shortest-path accumulation.
bool triangle_violated(double duv, double duz, double dzv) {
  const double indirect = duz + dzv;
  return duv - indirect > 1e-9 * std::max({duv, indirect, 1e-30});
}

void check_triangles(const std::vector<double>& c, int n) {
  auto at = [&](int i, int j) { return c[static_cast<std::size_t>(i) * n + j]; };
  if (n <= 600) {
    for (int u = 0; u < n; ++u)
      for (int z = 0; z < n; ++z)
        for (int v = 0; v < n; ++v)
          if (triangle_violated(at(u, v), at(u, z), at(z, v)))
            throw std::invalid_argument("metric graph: triangle inequality violated for vertices " +
                                        std::to_string(u) + ", " + std::to_string(z) + ", " + std::to_string(v));
    return;
  }
  Rng rng(0xC0FFEEULL);  // fixed probe seed for large instances
  for (int k = 0; k < 200000; ++k) {
    const int u = rng.uniform_int(0, n - 1), z = rng.uniform_int(0, n - 1), v = rng.uniform_int(0, n - 1);
    if (triangle_violated(at(u, v), at(u, z), at(z, v)))
      throw std::invalid_argument("metric graph: triangle inequality violated for vertices " + std::to_string(u) +
                                  ", " + std::to_string(z) + ", " + std::to_string(v));
  }
}

}  // namespace

double sensing_cost(Sensing f, double distance) {
  if (distance < 0.0) throw std::invalid_argument("sensing_cost: negative distance " + std::to_string(distance));
  switch (f) {
    case Sensing::identity:
      return distance;
    case Sensing::square_root:
      return std::sqrt(distance);
  }
  throw std::logic_error("sensing_cost: unknown sensing function");
}

Sensing sensing_from_name(std::string_view name) {
  if (name == "identity") return Sensing::identity;
  if (name == "square-root") return Sensing::square_root;
  throw std::invalid_argument("unknown sensing function '" + std::string(name) + "' (expected identity or square-root)");
}

std::string sensing_name(Sensing f) { return f == Sensing::identity ? "identity" : "square-root"; }

MetricGraph MetricGraph::from_cost_matrix(std::vector<double> weights, std::vector<double> cost,
                                          std::optional<std::vector<WeightedEdge>> edge_list) {
  const int n = static_cast<int>(weights.size());
  if (n == 0) throw std::invalid_argument("metric graph: vertex set is empty");
  if (cost.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("metric graph: cost matrix size does not match vertex count");
  for (int v = 0; v < n; ++v) {
    const double w = weights[static_cast<std::size_t>(v)];
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("metric graph: vertex " + std::to_string(v) + " has invalid weight");
  }
  auto at = [&](int i, int j) { return cost[static_cast<std::size_t>(i) * n + j]; };
  for (int u = 0; u < n; ++u) {
    if (at(u, u) != 0.0)
      throw std::invalid_argument("metric graph: nonzero self-cost at vertex " + std::to_string(u));
    for (int v = 0; v < n; ++v) {
      const double c = at(u, v);
      if (!std::isfinite(c) || c < 0.0)
        throw std::invalid_argument("metric graph: invalid cost at " + pair_str(u, v));
      if (c != at(v, u)) throw std::invalid_argument("metric graph: asymmetric cost at " + pair_str(u, v));
    }
  }
  check_triangles(cost, n);

  MetricGraph g;
  g.n_ = n;
  g.weights_ = std::move(weights);
  g.cost_ = std::move(cost);
  g.edges_ = std::move(edge_list);
  return g;
}

const std::vector<WeightedEdge>& MetricGraph::edge_list() const {
  if (!edges_) throw std::logic_error("metric graph: no edge list available");
  return *edges_;
}

double MetricGraph::total_weight() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

double MetricGraph::min_positive_weight() const {
  double best = 0.0;
  for (double w : weights_)
    if (w > 0.0 && (best == 0.0 || w < best)) best = w;
  return best;
}

double MetricGraph::min_positive_cost() const {
  double best = 0.0;
  for (double c : cost_)
    if (c > 0.0 && (best == 0.0 || c < best)) best = c;
  return best;
}

double MetricGraph::max_cost() const {
  double best = 0.0;
  for (double c : cost_) best = std::max(best, c);
  return best;
}

MetricGraph metric_closure(int vertex_count, const std::vector<WeightedEdge>& edges, std::vector<double> weights) {
  if (vertex_count <= 0) throw std::invalid_argument("metric_closure: vertex count must be positive");
  if (static_cast<int>(weights.size()) != vertex_count)
    throw std::invalid_argument("metric_closure: weight list size does not match vertex count");
  const int n = vertex_count;
  std::vector<double> d(static_cast<std::size_t>(n) * n, kInf);
  auto at = [&](int i, int j) -> double& { return d[static_cast<std::size_t>(i) * n + j]; };
  for (int v = 0; v < n; ++v) at(v, v) = 0.0;
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw std::invalid_argument("metric_closure: edge endpoint out of range at " + pair_str(e.u, e.v));
    if (e.u == e.v) throw std::invalid_argument("metric_closure: self-loop at vertex " + std::to_string(e.u));
    if (!(e.cost > 0.0) || !std::isfinite(e.cost))
      throw std::invalid_argument("metric_closure: edge " + pair_str(e.u, e.v) + " has nonpositive cost " +
                                  std::to_string(e.cost));
    at(e.u, e.v) = std::min(at(e.u, e.v), e.cost);
    at(e.v, e.u) = std::min(at(e.v, e.u), e.cost);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      const double dik = at(i, k);
      if (dik == kInf) continue;
      for (int j = 0; j < n; ++j) {
        const double alt = dik + at(k, j);
        if (alt < at(i, j)) at(i, j) = alt;
      }
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (at(i, j) == kInf)
        throw std::invalid_argument("metric_closure: graph is disconnected, vertex " + std::to_string(j) +
                                    " is unreachable from vertex " + std::to_string(i));
  return MetricGraph::from_cost_matrix(std::move(weights), std::move(d), edges);
}

MetricGraph subdivide_edges(const MetricGraph& g) {
  if (!g.has_edge_list())
    throw std::invalid_argument("subdivide_edges: graph has no explicit edge list");
  const auto& edges = g.edge_list();
  const int n = g.vertex_count();
  const int e = static_cast<int>(edges.size());
  const int nn = n + e;

  std::vector<double> weights(g.weights());
  weights.resize(static_cast<std::size_t>(nn), 0.0);

  // The closure is assembled directly from the original closure: a midpoint
  // only connects to its two endpoints, so it adds no shortcut between
  // original vertices and its own distances factor through an endpoint.
  std::vector<double> d(static_cast<std::size_t>(nn) * nn, 0.0);
  auto at = [&](int i, int j) -> double& { return d[static_cast<std::size_t>(i) * nn + j]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) at(i, j) = g.cost(i, j);
  for (int a = 0; a < e; ++a) {
    const int za = n + a;
    const double ha = edges[static_cast<std::size_t>(a)].cost / 2.0;
    const int ua = edges[static_cast<std::size_t>(a)].u, va = edges[static_cast<std::size_t>(a)].v;
    for (int x = 0; x < n; ++x) {
      const double dx = std::min(ha + g.cost(ua, x), ha + g.cost(va, x));
      at(za, x) = dx;
      at(x, za) = dx;
    }
  }
  for (int a = 0; a < e; ++a) {
    const int za = n + a;
    const double ha = edges[static_cast<std::size_t>(a)].cost / 2.0;
    const int ua = edges[static_cast<std::size_t>(a)].u, va = edges[static_cast<std::size_t>(a)].v;
    for (int b = a + 1; b < e; ++b) {
      const int zb = n + b;
      const double hb = edges[static_cast<std::size_t>(b)].cost / 2.0;
      const int ub = edges[static_cast<std::size_t>(b)].u, vb = edges[static_cast<std::size_t>(b)].v;
      const double dz = ha + hb +
                        std::min(std::min(g.cost(ua, ub), g.cost(ua, vb)), std::min(g.cost(va, ub), g.cost(va, vb)));
      at(za, zb) = dz;
      at(zb, za) = dz;
    }
  }

  std::vector<WeightedEdge> new_edges;
  new_edges.reserve(2 * static_cast<std::size_t>(e));
  for (int a = 0; a < e; ++a) {
    const int za = n + a;
    const double ha = edges[static_cast<std::size_t>(a)].cost / 2.0;
    new_edges.push_back({edges[static_cast<std::size_t>(a)].u, za, ha});
    new_edges.push_back({za, edges[static_cast<std::size_t>(a)].v, ha});
  }
  return MetricGraph::from_cost_matrix(std::move(weights), std::move(d), std::move(new_edges));
}

nlohmann::ordered_json MetricGraph::to_json() const {
  nlohmann::ordered_json doc;
  doc["vertices"] = nlohmann::ordered_json::array();
  for (int v = 0; v < n_; ++v) doc["vertices"].push_back({{"id", v}, {"weight", weight(v)}});
  doc["edges"] = nlohmann::ordered_json::array();
  if (edges_) {
    for (const auto& e : *edges_) doc["edges"].push_back({{"u", e.u}, {"v", e.v}, {"cost", e.cost}});
  } else {
    // Dense instances are persisted as their complete pairwise edge set; the
    // closure of that set reproduces the matrix because it is already metric.
    for (int u = 0; u < n_; ++u)
      for (int v = u + 1; v < n_; ++v) {
        if (!(cost(u, v) > 0.0))
          throw std::invalid_argument("metric graph: cannot serialize zero-cost vertex pair " + pair_str(u, v) +
                                      " without an explicit edge list");
        doc["edges"].push_back({{"u", u}, {"v", v}, {"cost", cost(u, v)}});
      }
  }
  doc["metric"] = "closure";
  return doc;
}

MetricGraph MetricGraph::from_json(const nlohmann::json& doc) {
  if (!doc.contains("vertices")) throw std::invalid_argument("graph document: missing field 'vertices'");
  if (!doc.contains("edges")) throw std::invalid_argument("graph document: missing field 'edges'");
  const auto& vs = doc.at("vertices");
  const int n = static_cast<int>(vs.size());
  std::vector<double> weights(static_cast<std::size_t>(n), 1.0);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const auto& v : vs) {
    const int id = v.at("id").get<int>();
    if (id < 0 || id >= n) throw std::invalid_argument("graph document: vertex id " + std::to_string(id) + " out of range");
    if (seen[static_cast<std::size_t>(id)])
      throw std::invalid_argument("graph document: duplicate vertex id " + std::to_string(id));
    seen[static_cast<std::size_t>(id)] = true;
    if (v.contains("weight")) weights[static_cast<std::size_t>(id)] = v.at("weight").get<double>();
  }
  std::vector<WeightedEdge> edges;
  for (const auto& e : doc.at("edges"))
    edges.push_back({e.at("u").get<int>(), e.at("v").get<int>(), e.at("cost").get<double>()});
  return metric_closure(n, edges, std::move(weights));
}

}  // namespace covctl
