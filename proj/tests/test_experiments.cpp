#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "covctl/experiments.hpp"
#include "covctl/gadget.hpp"
#include "covctl/metric_graph.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace covctl;
using nlohmann::json;

namespace {

MetricGraph unit_path3() {
  return metric_closure(3, {{0, 1, 1.0}, {1, 2, 1.0}}, {1.0, 1.0, 1.0});
}

json minimal_graph_doc() {
  return json{{"m", 1},
              {"seed", 5},
              {"instance", {{"kind", "graph"}, {"graph", unit_path3().to_json()}}},
              {"init", {{"policy", "explicit"}, {"positions", {0}}}}};
}

std::string parse_error(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scenario parsing fills documented defaults") {
  const Scenario sc = parse_scenario(minimal_graph_doc());
  CHECK(sc.id == "scenario-5");
  CHECK(sc.seed == 5);
  CHECK(sc.m == 1);
  CHECK(sc.radius_factor == 4.0);
  CHECK_FALSE(sc.epsilon0.has_value());
  CHECK(sc.sensing == Sensing::identity);
  CHECK(sc.solvers == std::vector<std::string>{"distributed", "centralized", "descent_own", "descent_neighbor"});
  CHECK(sc.kind == "graph");
  CHECK(sc.init_policy == "explicit");
  CHECK(sc.init_positions == std::vector<VertexId>{0});
}

TEST_CASE("scenario parse errors name the offending field") {
  json doc = minimal_graph_doc();
  doc.erase("m");
  CHECK(parse_error(doc).find("\"m\"") != std::string::npos);

  doc = minimal_graph_doc();
  doc["m"] = 0;
  CHECK(parse_error(doc).find("\"m\"") != std::string::npos);

  doc = minimal_graph_doc();
  doc["solvers"] = {"simulated_annealing"};
  CHECK(parse_error(doc).find("simulated_annealing") != std::string::npos);

  doc = minimal_graph_doc();
  doc["sensing"] = "cubic";
  CHECK(parse_error(doc).find("sensing") != std::string::npos);

  doc = minimal_graph_doc();
  doc["radius_factor"] = -1.0;
  CHECK(parse_error(doc).find("radius_factor") != std::string::npos);

  doc = minimal_graph_doc();
  doc.erase("instance");
  CHECK(parse_error(doc).find("instance") != std::string::npos);
}

TEST_CASE("scenario JSON round trip is stable") {
  const Scenario sc = parse_scenario(minimal_graph_doc());
  const auto doc = sc.to_json();
  const Scenario back = parse_scenario(doc);
  CHECK(back.to_json() == doc);
}

TEST_CASE("gadget scenarios default to the trap start") {
  const json doc{{"m", 5}, {"seed", 9}, {"instance", {{"kind", "gadget"}, {"n", 4}, {"L", 10.0}}}};
  const Scenario sc = parse_scenario(doc);
  const ResolvedInstance inst = resolve_scenario(sc);
  CHECK(inst.graph.vertex_count() == 6);
  CHECK(inst.init.positions == gen_gadget_instance(4, 0.5, 10.0).bad_config.positions);
  CHECK(inst.eps0 > 0.0);
}

TEST_CASE("corner initialization takes the samples nearest the origin") {
  const json doc{{"m", 2},
                 {"seed", 3},
                 {"instance",
                  {{"kind", "environment"},
                   {"environment", Environment(2.0, 1.0, {}, Density::uniform()).to_json()},
                   {"cell_size", 0.5}}}};
  const Scenario sc = parse_scenario(doc);
  CHECK(sc.init_policy.empty());  // the kind default is applied at resolution
  const ResolvedInstance inst = resolve_scenario(sc);
  REQUIRE(inst.disc.has_value());
  CHECK(inst.disc->samples.size() == 8);
  // Distance ties (sample 1 and the one above sample 0) break to the smaller id.
  CHECK(inst.init.positions == std::vector<VertexId>{0, 1});
}

TEST_CASE("random scenario generation is seed-deterministic") {
  GeneratorTemplate tpl;
  tpl.m = 3;
  tpl.width = 8.0;
  tpl.height = 6.0;
  tpl.obstacle_side_min = 1.0;
  tpl.obstacle_side_max = 2.0;
  tpl.sigma_min = 2.0;
  tpl.sigma_max = 4.0;

  const Scenario a = generate_random_scenario(tpl, 42);
  const Scenario b = generate_random_scenario(tpl, 42);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.id == "rand-42");
  CHECK(a.kind == "environment");
  CHECK(a.init_policy == "corner");

  const Scenario c = generate_random_scenario(tpl, 43);
  CHECK(a.to_json() != c.to_json());

  // The generated document runs through the ordinary parser unchanged.
  const Scenario back = parse_scenario(a.to_json());
  CHECK(back.to_json() == a.to_json());

  // Template round trip.
  CHECK(GeneratorTemplate::from_json(tpl.to_json()).to_json() == tpl.to_json());
}

TEST_CASE("full occupancy batch: every solver reports zero cost and no ranking") {
  json doc = minimal_graph_doc();
  doc["m"] = 3;
  doc["init"]["positions"] = {0, 1, 2};
  doc["solvers"] = json::array();
  for (const std::string& s : canonical_solvers()) doc["solvers"].push_back(s);

  const Report rep = run_experiment({parse_scenario(doc)});
  REQUIRE(rep.rows.size() == canonical_solvers().size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const ReportRow& r = rep.rows[i];
    CHECK(r.solver == canonical_solvers()[i]);  // canonical row order
    CHECK_FALSE(r.failed);
    CHECK(r.cost == doctest::Approx(0.0));
    CHECK_FALSE(r.pct_vs_centralized.has_value());  // anchor cost 0: no percentage
    REQUIRE(!r.cost_curve.empty());
    CHECK(r.cost_curve.front() == doctest::Approx(0.0));
  }
}

TEST_CASE("descent trap batch separates the solver families") {
  const json doc{{"m", 5}, {"seed", 1}, {"id", "trap"}, {"instance", {{"kind", "gadget"}, {"n", 4}, {"L", 10.0}}}};
  const Report rep = run_experiment({parse_scenario(doc)});

  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.rows[0].solver == "centralized");
  CHECK(rep.rows[1].solver == "distributed");
  CHECK(rep.rows[2].solver == "descent_own");
  CHECK(rep.rows[3].solver == "descent_neighbor");

  CHECK(rep.rows[0].cost == doctest::Approx(1.0));
  CHECK(rep.rows[1].cost == doctest::Approx(1.0));
  CHECK(rep.rows[2].cost == doctest::Approx(10.0));
  CHECK(rep.rows[3].cost == doctest::Approx(10.0));

  CHECK(*rep.rows[0].pct_vs_centralized == doctest::Approx(0.0));
  CHECK(*rep.rows[1].pct_vs_centralized == doctest::Approx(0.0));
  CHECK(*rep.rows[2].pct_vs_centralized == doctest::Approx(900.0));
  CHECK(*rep.rows[3].pct_vs_centralized == doctest::Approx(900.0));

  // The distributed row reaches the optimum through one single-hop exchange.
  CHECK(rep.rows[1].moves_type1 == 0);
  CHECK(rep.rows[1].moves_type2_single == 1);
  CHECK(rep.rows[1].moves_type2_multi == 0);
  CHECK(rep.rows[1].messages > 0);

  // Each row's trail walks from the shared start to its final configuration.
  for (const ReportRow& r : rep.rows) {
    REQUIRE(!r.trail.empty());
    CHECK(r.trail.front().positions == gen_gadget_instance(4, 0.5, 10.0).bad_config.positions);
    CHECK(r.cost_curve.size() == r.trail.size());
    CHECK(r.cost_curve.front() == doctest::Approx(10.0));
    CHECK(r.cost_curve.back() == doctest::Approx(r.cost));
  }
}

TEST_CASE("a failing scenario is contained to its own rows") {
  json good = minimal_graph_doc();
  good["id"] = "ok";
  json bad = minimal_graph_doc();
  bad["id"] = "broken";
  bad["m"] = 7;  // more robots than explicit start positions
  const Report rep = run_experiment({parse_scenario(bad), parse_scenario(good)});

  REQUIRE(rep.rows.size() == 8);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rep.rows[i].scenario_id == "broken");
    CHECK(rep.rows[i].failed);
    CHECK_FALSE(rep.rows[i].error.empty());
  }
  for (std::size_t i = 4; i < 8; ++i) {
    CHECK(rep.rows[i].scenario_id == "ok");
    CHECK_FALSE(rep.rows[i].failed);
  }
}

TEST_CASE("CSV rendering is fixed-schema and byte-stable") {
  const json doc{{"m", 5}, {"seed", 1}, {"id", "trap"}, {"instance", {{"kind", "gadget"}, {"n", 4}, {"L", 10.0}}}};
  const Report rep = run_experiment({parse_scenario(doc)});

  const std::string csv = report_csv(rep);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "scenario_id,solver,cost,pct_vs_centralized,moves_type1,moves_type2_single,moves_type2_multi,messages");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    ++rows;
    CHECK(line.substr(0, 5) == "trap,");
  }
  CHECK(rows == 4);
  CHECK(csv == report_csv(rep));

  // Report JSON round trip preserves every byte of the re-rendered CSV.
  const Report back = Report::from_json(rep.to_json());
  CHECK(report_csv(back) == csv);
  CHECK(back.to_json() == rep.to_json());
}

TEST_CASE("rendering writes identical artifacts on every run") {
  GeneratorTemplate tpl;
  tpl.m = 2;
  tpl.width = 7.0;
  tpl.height = 6.0;
  tpl.obstacle_count = 1;
  tpl.obstacle_side_min = 1.0;
  tpl.obstacle_side_max = 2.0;
  tpl.sigma_min = 2.0;
  tpl.sigma_max = 4.0;
  tpl.solvers = {"centralized", "descent_own"};
  const Scenario sc = generate_random_scenario(tpl, 7);
  const Report rep = run_experiment({sc});

  const std::filesystem::path base = std::filesystem::temp_directory_path() / "covctl_render_test";
  std::filesystem::remove_all(base);
  const auto paths_a = render_report(rep, {"csv", "json", "svg"}, (base / "a").string());
  const auto paths_b = render_report(rep, {"csv", "json", "svg"}, (base / "b").string());
  REQUIRE(paths_a.size() == paths_b.size());
  REQUIRE(paths_a.size() >= 4);  // csv + json + one svg per solver row

  for (std::size_t i = 0; i < paths_a.size(); ++i) CHECK(slurp(paths_a[i]) == slurp(paths_b[i]));

  CHECK_THROWS_AS(render_report(rep, {"pdf"}, (base / "c").string()), std::invalid_argument);
  std::filesystem::remove_all(base);
}
