#pragma once

#include <utility>
#include <vector>

#include "covctl/metric_graph.hpp"
#include "covctl/partition.hpp"

namespace covctl {

struct SolveResult {
  Configuration config;
  double cost{};
  long iterations{};  // accepted moves, or evaluated candidates for exhaustive search
  // Snapshot after each accepted move; costs decrease by at least the solver's
  // improvement threshold per step.
  std::vector<std::pair<Configuration, double>> history;
};

// Improvement threshold tied to the instance scale:
//   epsilon * w0 * c_min / (|V| * m)
// with w0 the smallest positive vertex weight and c_min the smallest positive
// pairwise cost. Falls back to 1.0 on degenerate all-zero instances, where
// any threshold terminates immediately.
double epsilon0_schedule(const MetricGraph& g, int m, double epsilon = 0.01);

// Exhaustive optimum over m-subsets of vertices (multisets never improve on
// subsets). Guarded: C(|V|, m) must not exceed 10^6. Ties resolve to the
// lexicographically smallest vertex set.
SolveResult brute_force_optimum(const MetricGraph& g, int m);

// Objective change when the listed robots move onto the listed vertices
// simultaneously (negative = improvement). List sizes must match.
double swap_gain(const MetricGraph& g, const Configuration& q, const std::vector<int>& out_robots,
                 const std::vector<VertexId>& in_vertices);

// Objective change when one robot relocates to v, evaluated in O(|V|) from
// precomputed best/second service costs for the current configuration.
double relocation_gain(const MetricGraph& g, const ServiceCosts& sc, int robot, VertexId v);

// First-improvement local search over single swaps (p = 1) or swaps of up to
// two robots (p = 2). Scan order: robots by UID, candidate vertices by id.
// A move is accepted only when it improves the objective by at least eps0.
SolveResult centralized_local_search(const MetricGraph& g, int m, int p, double eps0, Configuration init);

enum class DescentMode {
  own_partition,   // accept when the robot's own cell cost improves
  neighbor_aware,  // accept when the full objective improves
};

// Baseline that only relocates robots within their own cells, mirroring
// discrete move-to-centroid laws. Each robot takes its best admissible
// in-cell relocation per pass; terminates when no robot can improve by eps0.
SolveResult descent_baseline(const MetricGraph& g, int m, double eps0, Configuration init, DescentMode mode);

}  // namespace covctl
