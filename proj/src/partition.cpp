#include "covctl/partition.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace covctl {

namespace {

void check_config(const MetricGraph& g, const Configuration& q) {
  if (q.positions.empty()) throw std::invalid_argument("configuration: no robots");
  for (int i = 0; i < q.size(); ++i) {
    const VertexId v = q.at(i);
    if (v < 0 || v >= g.vertex_count())
      throw std::invalid_argument("configuration: robot " + std::to_string(i) + " is on invalid vertex " +
                                  std::to_string(v));
  }
}

}  // namespace

PartitionAssignment assign_partitions(const MetricGraph& g, const Configuration& q) {
  check_config(g, q);
  const int n = g.vertex_count();
  const int m = q.size();
  PartitionAssignment part;
  part.owner.assign(static_cast<std::size_t>(n), 0);
  part.radius.assign(static_cast<std::size_t>(m), 0.0);
  part.members.assign(static_cast<std::size_t>(m), {});
  for (VertexId u = 0; u < n; ++u) {
    int best = 0;
    double best_cost = g.cost(u, q.at(0));
    for (int i = 1; i < m; ++i) {
      const double c = g.cost(u, q.at(i));
      if (c < best_cost) {  // strict: ties stay with the smaller UID
        best_cost = c;
        best = i;
      }
    }
    part.owner[static_cast<std::size_t>(u)] = best;
    part.members[static_cast<std::size_t>(best)].push_back(u);
    part.radius[static_cast<std::size_t>(best)] = std::max(part.radius[static_cast<std::size_t>(best)], best_cost);
  }
  return part;
}

double coverage_cost(const MetricGraph& g, const Configuration& q) {
  check_config(g, q);
  const int n = g.vertex_count();
  const int m = q.size();
  double total = 0.0;
  for (VertexId u = 0; u < n; ++u) {
    double best = g.cost(u, q.at(0));
    for (int i = 1; i < m; ++i) best = std::min(best, g.cost(u, q.at(i)));
    total += g.weight(u) * best;
  }
  return total;
}

namespace {

std::vector<std::vector<int>> neighbor_sets_from_radii(const MetricGraph& g, const Configuration& q,
                                                       const std::vector<double>& radii, double radius_factor) {
  if (radius_factor <= 0.0) throw std::invalid_argument("neighbor_sets: radius factor must be positive");
  const int m = q.size();
  if (static_cast<int>(radii.size()) != m)
    throw std::invalid_argument("neighbor_sets: radii do not match configuration");
  std::vector<std::vector<int>> neigh(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double reach =
          radius_factor * std::max(radii[static_cast<std::size_t>(i)], radii[static_cast<std::size_t>(j)]);
      if (g.cost(q.at(i), q.at(j)) <= reach) {
        neigh[static_cast<std::size_t>(i)].push_back(j);
        neigh[static_cast<std::size_t>(j)].push_back(i);
      }
    }
  return neigh;
}

}  // namespace

std::vector<std::vector<int>> neighbor_sets(const MetricGraph& g, const Configuration& q,
                                            const PartitionAssignment& part, double radius_factor) {
  check_config(g, q);
  return neighbor_sets_from_radii(g, q, part.radius, radius_factor);
}

std::vector<std::vector<int>> neighbor_sets(const MetricGraph& g, const Configuration& q,
                                            const std::vector<double>& radii, double radius_factor) {
  check_config(g, q);
  return neighbor_sets_from_radii(g, q, radii, radius_factor);
}

std::vector<double> subdivided_radii(const MetricGraph& g, const Configuration& q,
                                     const PartitionAssignment& part) {
  check_config(g, q);
  const int m = q.size();
  if (static_cast<int>(part.radius.size()) != m)
    throw std::invalid_argument("subdivided_radii: partition does not match configuration");
  std::vector<double> radii = part.radius;
  // A midpoint on (u,v) sits at c(u,v)/2 beyond the nearer endpoint, so the
  // robot minimizing min(c(u,q_i), c(v,q_i)) owns it (ties to the smaller UID,
  // as in assign_partitions).
  auto absorb = [&](VertexId u, VertexId v) {
    const double edge = g.cost(u, v);
    if (edge <= 0.0) return;
    int best = 0;
    double best_cost = std::min(g.cost(u, q.at(0)), g.cost(v, q.at(0)));
    for (int i = 1; i < m; ++i) {
      const double c = std::min(g.cost(u, q.at(i)), g.cost(v, q.at(i)));
      if (c < best_cost) {
        best_cost = c;
        best = i;
      }
    }
    radii[static_cast<std::size_t>(best)] =
        std::max(radii[static_cast<std::size_t>(best)], best_cost + edge / 2.0);
  };
  if (g.has_edge_list()) {
    for (const WeightedEdge& e : g.edge_list()) absorb(e.u, e.v);
  } else {
    const int n = g.vertex_count();
    for (VertexId u = 0; u < n; ++u)
      for (VertexId v = u + 1; v < n; ++v) absorb(u, v);
  }
  return radii;
}

ServiceCosts compute_service_costs(const MetricGraph& g, const Configuration& q) {
  check_config(g, q);
  const int n = g.vertex_count();
  const int m = q.size();
  ServiceCosts sc;
  sc.best.assign(static_cast<std::size_t>(n), 0.0);
  sc.second.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  sc.owner.assign(static_cast<std::size_t>(n), 0);
  for (VertexId u = 0; u < n; ++u) {
    double b1 = std::numeric_limits<double>::infinity();
    double b2 = std::numeric_limits<double>::infinity();
    int who = 0;
    for (int i = 0; i < m; ++i) {
      const double c = g.cost(u, q.at(i));
      if (c < b1) {
        b2 = b1;
        b1 = c;
        who = i;
      } else {
        b2 = std::min(b2, c);
      }
    }
    sc.best[static_cast<std::size_t>(u)] = b1;
    sc.second[static_cast<std::size_t>(u)] = b2;
    sc.owner[static_cast<std::size_t>(u)] = who;
  }
  return sc;
}

}  // namespace covctl
