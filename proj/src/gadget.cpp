#include "covctl/gadget.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace covctl {

GadgetInstance gen_gadget_instance(int n, double eps, double L) {
  if (n < 2) throw std::invalid_argument("gen_gadget_instance: n must be at least 2, got " + std::to_string(n));
  if (!(L > 2.0)) throw std::invalid_argument("gen_gadget_instance: L must exceed 2, got " + std::to_string(L));
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("gen_gadget_instance: eps must lie in (0,1), got " + std::to_string(eps));

  GadgetInstance inst;
  const VertexId a = 0, b = 1;
  const int total = n + 2;
  std::vector<double> weights(static_cast<std::size_t>(total), 1.0);
  std::vector<WeightedEdge> edges;
  edges.push_back({a, b, 1.0});
  for (int j = 0; j < n; ++j) {
    const VertexId city = 2 + j;
    inst.cities.push_back(city);
    edges.push_back({a, city, L});
    edges.push_back({b, city, L});
    for (int k = 0; k < j; ++k) edges.push_back({2 + k, city, L});
  }
  inst.graph = metric_closure(total, edges, std::move(weights));
  inst.vertex_a = a;
  inst.vertex_b = b;

  // City robots take the small UIDs so the uncovered city (equidistant from
  // everyone) is owned by a city robot; that keeps every within-partition
  // relocation cost-neutral.
  for (int j = 0; j + 1 < n; ++j) inst.bad_config.positions.push_back(inst.cities[static_cast<std::size_t>(j)]);
  inst.bad_config.positions.push_back(a);
  inst.bad_config.positions.push_back(b);

  inst.good_config.positions.push_back(a);
  for (VertexId city : inst.cities) inst.good_config.positions.push_back(city);

  const double bad_cost = coverage_cost(inst.graph, inst.bad_config);
  const double good_cost = coverage_cost(inst.graph, inst.good_config);
  if (bad_cost != L)
    throw std::logic_error("gen_gadget_instance: bad configuration certificate failed, cost " +
                           std::to_string(bad_cost) + " != " + std::to_string(L));
  if (good_cost != 1.0)
    throw std::logic_error("gen_gadget_instance: good configuration certificate failed, cost " +
                           std::to_string(good_cost));

  // Local-optimum certificate: brute-force every single relocation of a robot
  // to a vertex of its own cell and demand no strict improvement.
  const auto part = assign_partitions(inst.graph, inst.bad_config);
  for (int r = 0; r < inst.bad_config.size(); ++r) {
    for (VertexId v : part.members[static_cast<std::size_t>(r)]) {
      Configuration moved = inst.bad_config;
      moved.positions[static_cast<std::size_t>(r)] = v;
      if (coverage_cost(inst.graph, moved) < bad_cost - 1e-12)
        throw std::logic_error("gen_gadget_instance: bad configuration is not a within-partition local optimum");
    }
  }
  return inst;
}

}  // namespace covctl
