#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "covctl/metric_graph.hpp"
#include "doctest.h"

using namespace covctl;

namespace {

MetricGraph unit_path3() {
  return metric_closure(3, {{0, 1, 1.0}, {1, 2, 1.0}}, {1.0, 1.0, 1.0});
}

}  // namespace

TEST_CASE("closure of a path graph") {
  const MetricGraph g = unit_path3();
  CHECK(g.vertex_count() == 3);
  CHECK(g.cost(0, 1) == doctest::Approx(1.0));
  CHECK(g.cost(1, 2) == doctest::Approx(1.0));
  CHECK(g.cost(0, 2) == doctest::Approx(2.0));
  for (VertexId v = 0; v < 3; ++v) CHECK(g.cost(v, v) == 0.0);
  for (VertexId u = 0; u < 3; ++u)
    for (VertexId v = 0; v < 3; ++v) CHECK(g.cost(u, v) == g.cost(v, u));
  CHECK(g.has_edge_list());
  CHECK(g.edge_list().size() == 2);
  CHECK(g.total_weight() == doctest::Approx(3.0));
  CHECK(g.min_positive_cost() == doctest::Approx(1.0));
  CHECK(g.max_cost() == doctest::Approx(2.0));
}

TEST_CASE("closure shortens a slack direct edge") {
  const MetricGraph g = metric_closure(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 3.0}}, {1.0, 1.0, 1.0});
  CHECK(g.cost(0, 2) == doctest::Approx(2.0));  // via the middle vertex
}

TEST_CASE("closure rejects bad inputs") {
  const std::vector<double> w3(3, 1.0);
  CHECK_THROWS_AS(metric_closure(3, {{0, 1, 1.0}}, w3), std::invalid_argument);           // disconnected
  CHECK_THROWS_AS(metric_closure(3, {{0, 1, 0.0}, {1, 2, 1.0}}, w3), std::invalid_argument);  // zero cost
  CHECK_THROWS_AS(metric_closure(3, {{0, 0, 1.0}, {1, 2, 1.0}}, w3), std::invalid_argument);  // self loop
  CHECK_THROWS_AS(metric_closure(3, {{0, 3, 1.0}, {1, 2, 1.0}}, w3), std::invalid_argument);  // bad endpoint
  CHECK_THROWS_AS(metric_closure(0, {}, {}), std::invalid_argument);
}

TEST_CASE("from_cost_matrix validates the metric axioms") {
  const std::vector<double> w3(3, 1.0);

  SUBCASE("valid matrix is accepted") {
    const MetricGraph g = MetricGraph::from_cost_matrix(w3, {0, 1, 2, 1, 0, 1, 2, 1, 0});
    CHECK(g.cost(0, 2) == doctest::Approx(2.0));
    CHECK_FALSE(g.has_edge_list());
  }
  SUBCASE("asymmetric matrix is rejected") {
    CHECK_THROWS_AS(MetricGraph::from_cost_matrix(w3, {0, 1, 1, 2, 0, 1, 1, 1, 0}), std::invalid_argument);
  }
  SUBCASE("nonzero diagonal is rejected") {
    CHECK_THROWS_AS(MetricGraph::from_cost_matrix(w3, {0.5, 1, 1, 1, 0, 1, 1, 1, 0}), std::invalid_argument);
  }
  SUBCASE("negative weight is rejected") {
    CHECK_THROWS_AS(MetricGraph::from_cost_matrix({1.0, -1.0, 1.0}, {0, 1, 2, 1, 0, 1, 2, 1, 0}),
                    std::invalid_argument);
  }
  SUBCASE("triangle violation is rejected") {
    CHECK_THROWS_AS(MetricGraph::from_cost_matrix(w3, {0, 1, 3, 1, 0, 1, 3, 1, 0}), std::invalid_argument);
  }
}

TEST_CASE("edge subdivision halves every edge at a weightless midpoint") {
  const MetricGraph g =
      metric_closure(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}, {1.0, 1.0, 1.0});  // unit triangle
  const MetricGraph s = subdivide_edges(g);
  REQUIRE(s.vertex_count() == 6);

  // Original pairwise costs survive exactly.
  for (VertexId u = 0; u < 3; ++u)
    for (VertexId v = 0; v < 3; ++v) CHECK(s.cost(u, v) == doctest::Approx(g.cost(u, v)));

  // The three added vertices are weightless midpoints: each sits at 0.5 from
  // two originals and 1.5 from the third, and midpoints are pairwise at 1.0.
  for (VertexId z = 3; z < 6; ++z) {
    CHECK(s.weight(z) == 0.0);
    std::vector<double> to_orig = {s.cost(z, 0), s.cost(z, 1), s.cost(z, 2)};
    std::sort(to_orig.begin(), to_orig.end());
    CHECK(to_orig[0] == doctest::Approx(0.5));
    CHECK(to_orig[1] == doctest::Approx(0.5));
    CHECK(to_orig[2] == doctest::Approx(1.5));
  }
  for (VertexId z1 = 3; z1 < 6; ++z1)
    for (VertexId z2 = z1 + 1; z2 < 6; ++z2) CHECK(s.cost(z1, z2) == doctest::Approx(1.0));

  // Matrix-built graphs carry no edge list to subdivide.
  const MetricGraph dense = MetricGraph::from_cost_matrix({1, 1}, {0, 1, 1, 0});
  CHECK_THROWS_AS(subdivide_edges(dense), std::invalid_argument);
}

TEST_CASE("sensing functions") {
  CHECK(sensing_cost(Sensing::identity, 2.25) == doctest::Approx(2.25));
  CHECK(sensing_cost(Sensing::square_root, 2.25) == doctest::Approx(1.5));
  CHECK(sensing_cost(Sensing::square_root, 0.0) == 0.0);
  CHECK_THROWS_AS(sensing_cost(Sensing::identity, -1.0), std::invalid_argument);

  CHECK(sensing_from_name(sensing_name(Sensing::identity)) == Sensing::identity);
  CHECK(sensing_from_name(sensing_name(Sensing::square_root)) == Sensing::square_root);
  CHECK_THROWS_AS(sensing_from_name("cubic"), std::invalid_argument);
}

TEST_CASE("graph JSON round trip") {
  const MetricGraph g = unit_path3();
  const auto doc = g.to_json();
  const MetricGraph back = MetricGraph::from_json(doc);
  REQUIRE(back.vertex_count() == g.vertex_count());
  for (VertexId v = 0; v < 3; ++v) CHECK(back.weight(v) == doctest::Approx(g.weight(v)));
  for (VertexId u = 0; u < 3; ++u)
    for (VertexId v = 0; v < 3; ++v) CHECK(back.cost(u, v) == doctest::Approx(g.cost(u, v)));
  CHECK(back.to_json() == doc);

  CHECK_THROWS_AS(MetricGraph::from_json(nlohmann::json::object()), std::invalid_argument);
}
