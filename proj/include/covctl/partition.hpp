#pragma once

#include <vector>

#include "covctl/metric_graph.hpp"

namespace covctl {

// Ordered robot positions; the index of an entry is the robot's UID.
// Duplicate positions are allowed.
struct Configuration {
  std::vector<VertexId> positions;

  int size() const { return static_cast<int>(positions.size()); }
  VertexId at(int robot) const { return positions[static_cast<std::size_t>(robot)]; }
};

// Vertex ownership induced by a configuration: every vertex belongs to the
// robot with minimum cost to it, ties to the smaller UID. A robot co-located
// behind a smaller UID owns nothing and has radius 0.
struct PartitionAssignment {
  std::vector<int> owner;                       // vertex -> robot UID
  std::vector<double> radius;                   // robot -> max cost to an owned vertex
  std::vector<std::vector<VertexId>> members;   // robot -> owned vertices, ascending
};

PartitionAssignment assign_partitions(const MetricGraph& g, const Configuration& q);

// Total objective: sum over vertices of weight times cost to the nearest robot.
double coverage_cost(const MetricGraph& g, const Configuration& q);

// N(i) = { j != i : cost(q_i, q_j) <= radius_factor * max(radius_i, radius_j) }.
// The relation is symmetric; co-located robots are always mutual neighbors.
std::vector<std::vector<int>> neighbor_sets(const MetricGraph& g, const Configuration& q,
                                            const PartitionAssignment& part, double radius_factor);

// Same rule with caller-supplied radii (e.g. subdivided_radii below).
std::vector<std::vector<int>> neighbor_sets(const MetricGraph& g, const Configuration& q,
                                            const std::vector<double>& radii, double radius_factor);

// Partition radii measured on the edge-subdivided metric: every edge (u,v) is
// split by a zero-weight midpoint, which the nearest robot absorbs at distance
// c(u,v)/2 + min(c(u,q_i), c(v,q_i)). These dominate the plain radii and give
// zero-radius robots a communication range of half their incident edges, which
// is what makes the message protocol's relocation chains reachable; the plain
// radii would isolate freshly optimal singleton cells. Uses the stored edge
// list when present, otherwise every positive-cost pair.
std::vector<double> subdivided_radii(const MetricGraph& g, const Configuration& q,
                                     const PartitionAssignment& part);

// Per-vertex best and second-best service costs for a configuration; used by
// swap scans so a single-relocation gain is O(|V|).
struct ServiceCosts {
  std::vector<double> best;    // cost to nearest robot
  std::vector<double> second;  // cost to nearest robot excluding the owner (+inf when m == 1)
  std::vector<int> owner;      // nearest robot, ties to smaller UID
};

ServiceCosts compute_service_costs(const MetricGraph& g, const Configuration& q);

}  // namespace covctl
