#pragma once

#include <vector>

#include "covctl/metric_graph.hpp"
#include "covctl/partition.hpp"

namespace covctl {

// Worst-case instance separating within-partition descent from swap-based
// search: n+1 unit-weight cities pairwise at cost L, where city 0 consists of
// two vertices a and b at cost 1. bad_config parks robots on every city
// except the last one and on both a and b, so one city stays uncovered at
// cost L while no robot can improve by relocating inside its own cell.
// good_config covers every city once, at cost exactly 1 (vertex b served
// from a).
struct GadgetInstance {
  MetricGraph graph;
  Configuration bad_config;
  Configuration good_config;
  VertexId vertex_a{};
  VertexId vertex_b{};
  std::vector<VertexId> cities;  // city_1 .. city_n
};

// Requires n >= 2, L > 2, eps in (0,1). eps is accepted for interface
// stability but the construction is scale-free and does not depend on it.
// The returned instance is certified at generation time: the two anchor
// costs hold exactly and bad_config admits no improving within-partition
// relocation.
GadgetInstance gen_gadget_instance(int n, double eps, double L);

}  // namespace covctl
