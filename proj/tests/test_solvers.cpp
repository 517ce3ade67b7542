#include <cmath>
#include <stdexcept>
#include <vector>

#include "covctl/gadget.hpp"
#include "covctl/metric_graph.hpp"
#include "covctl/partition.hpp"
#include "covctl/rng.hpp"
#include "covctl/solvers.hpp"
#include "doctest.h"

using namespace covctl;

namespace {

MetricGraph unit_path3() {
  return metric_closure(3, {{0, 1, 1.0}, {1, 2, 1.0}}, {1.0, 1.0, 1.0});
}

// Random Euclidean instance; the triangle inequality holds by construction.
MetricGraph random_euclidean(std::uint64_t seed, int n) {
  Rng rng(seed);
  std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = rng.uniform(0.0, 1.0);
    ys[static_cast<std::size_t>(i)] = rng.uniform(0.0, 1.0);
  }
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = rng.uniform_open_low(0.0, 1.0);
  std::vector<double> cost(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double dx = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
      const double dy = ys[static_cast<std::size_t>(i)] - ys[static_cast<std::size_t>(j)];
      cost[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] =
          std::sqrt(dx * dx + dy * dy);
    }
  return MetricGraph::from_cost_matrix(std::move(w), std::move(cost));
}

void check_history(const SolveResult& res, double initial_cost, double eps0) {
  double prev = initial_cost;
  for (const auto& [cfg, c] : res.history) {
    CHECK(c <= prev - eps0 + 1e-12);
    prev = c;
  }
  CHECK(res.cost == doctest::Approx(prev));
}

}  // namespace

TEST_CASE("exhaustive optimum on small instances") {
  const MetricGraph g = unit_path3();

  const SolveResult one = brute_force_optimum(g, 1);
  CHECK(one.config.positions == std::vector<VertexId>{1});
  CHECK(one.cost == doctest::Approx(2.0));

  const SolveResult all = brute_force_optimum(g, 3);
  CHECK(all.cost == doctest::Approx(0.0));

  const GadgetInstance inst = gen_gadget_instance(2, 0.5, 4.0);
  const SolveResult opt = brute_force_optimum(inst.graph, 3);
  CHECK(opt.cost == doctest::Approx(1.0));  // one of the paired vertices stays uncovered at 1
}

TEST_CASE("exhaustive search refuses oversized instances") {
  const int n = 40;
  std::vector<double> cost(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 1.0);
  for (int i = 0; i < n; ++i)
    cost[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] = 0.0;
  const MetricGraph g = MetricGraph::from_cost_matrix(std::vector<double>(static_cast<std::size_t>(n), 1.0), cost);
  CHECK_THROWS_AS(brute_force_optimum(g, 20), std::invalid_argument);
}

TEST_CASE("swap gain matches objective differences") {
  const MetricGraph g = unit_path3();
  const Configuration q{{0}};

  CHECK(swap_gain(g, q, {0}, {0}) == doctest::Approx(0.0));
  CHECK(swap_gain(g, q, {0}, {1}) == doctest::Approx(-1.0));  // 3 -> 2

  const GadgetInstance inst = gen_gadget_instance(4, 0.5, 10.0);
  const int b_robot = inst.bad_config.size() - 1;
  const VertexId last_city = inst.cities.back();
  CHECK(swap_gain(inst.graph, inst.bad_config, {b_robot}, {last_city}) == doctest::Approx(-9.0));

  CHECK_THROWS_AS(swap_gain(g, q, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(swap_gain(g, q, {0, 0}, {1, 2}), std::invalid_argument);
}

TEST_CASE("relocation gain agrees with a full swap evaluation") {
  const MetricGraph g = random_euclidean(11, 9);
  const Configuration q{{0, 4, 7}};
  const ServiceCosts sc = compute_service_costs(g, q);
  for (int r = 0; r < q.size(); ++r)
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      CHECK(relocation_gain(g, sc, r, v) == doctest::Approx(swap_gain(g, q, {r}, {v})).epsilon(1e-9));
}

TEST_CASE("single-swap search walks the path to its median") {
  const MetricGraph g = unit_path3();
  const double eps0 = epsilon0_schedule(g, 1);
  const SolveResult res = centralized_local_search(g, 1, 1, eps0, Configuration{{0}});
  CHECK(res.config.positions == std::vector<VertexId>{1});
  CHECK(res.cost == doctest::Approx(2.0));
  CHECK(res.iterations == 1);
  check_history(res, 3.0, eps0);
}

TEST_CASE("swap search escapes the descent trap") {
  const GadgetInstance inst = gen_gadget_instance(4, 0.5, 10.0);
  const int m = inst.bad_config.size();
  const double eps0 = epsilon0_schedule(inst.graph, m);

  const SolveResult p1 = centralized_local_search(inst.graph, m, 1, eps0, inst.bad_config);
  CHECK(p1.cost == doctest::Approx(1.0));
  const SolveResult p2 = centralized_local_search(inst.graph, m, 2, eps0, inst.bad_config);
  CHECK(p2.cost == doctest::Approx(1.0));

  // In-cell descent cannot: every within-cell relocation is cost-neutral.
  const SolveResult own = descent_baseline(inst.graph, m, eps0, inst.bad_config, DescentMode::own_partition);
  CHECK(own.cost == doctest::Approx(10.0));
  CHECK(own.iterations == 0);
  const SolveResult aware = descent_baseline(inst.graph, m, eps0, inst.bad_config, DescentMode::neighbor_aware);
  CHECK(aware.cost == doctest::Approx(10.0));
}

TEST_CASE("in-cell descent still finds the path median") {
  const MetricGraph g = unit_path3();
  const double eps0 = epsilon0_schedule(g, 1);
  for (const DescentMode mode : {DescentMode::own_partition, DescentMode::neighbor_aware}) {
    const SolveResult res = descent_baseline(g, 1, eps0, Configuration{{0}}, mode);
    CHECK(res.config.positions == std::vector<VertexId>{1});
    CHECK(res.cost == doctest::Approx(2.0));
    check_history(res, 3.0, eps0);
  }
}

TEST_CASE("improvement threshold scales with the instance") {
  const MetricGraph g = unit_path3();
  // 0.01 * w0 * c_min / (|V| * m) with w0 = c_min = 1, |V| = 3.
  CHECK(epsilon0_schedule(g, 2) == doctest::Approx(0.01 / 6.0));
  CHECK(epsilon0_schedule(g, 1, 0.1) == doctest::Approx(0.1 / 3.0));

  const MetricGraph point = MetricGraph::from_cost_matrix({1.0}, {0.0});
  CHECK(epsilon0_schedule(point, 1) == doctest::Approx(1.0));  // degenerate fallback

  CHECK_THROWS_AS(epsilon0_schedule(g, 0), std::invalid_argument);
  CHECK_THROWS_AS(epsilon0_schedule(g, 1, 0.0), std::invalid_argument);
}

TEST_CASE("every solver stays within the bracket [optimum, start]") {
  for (const std::uint64_t seed : {3u, 17u, 98u}) {
    const MetricGraph g = random_euclidean(seed, 8);
    const int m = 2;
    const double eps0 = epsilon0_schedule(g, m);
    const Configuration init{{0, 1}};
    const double start = coverage_cost(g, init);
    const double opt = brute_force_optimum(g, m).cost;

    for (const SolveResult& res : {centralized_local_search(g, m, 1, eps0, init),
                                   centralized_local_search(g, m, 2, eps0, init),
                                   descent_baseline(g, m, eps0, init, DescentMode::own_partition),
                                   descent_baseline(g, m, eps0, init, DescentMode::neighbor_aware)}) {
      CHECK(res.cost >= opt - 1e-9);
      CHECK(res.cost <= start + 1e-9);
      CHECK(res.cost == doctest::Approx(coverage_cost(g, res.config)));
      check_history(res, start, eps0);
    }
  }
}
