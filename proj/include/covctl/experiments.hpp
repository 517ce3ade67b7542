#pragma once

#include <optional>
#include <string>
#include <vector>

#include "covctl/environment.hpp"
#include "covctl/metric_graph.hpp"
#include "covctl/partition.hpp"
#include "covctl/protocol.hpp"
#include "covctl/solvers.hpp"
#include "json.hpp"

namespace covctl {

// Known solver names, in the order report rows are emitted:
//   brute_force      exhaustive optimum (guarded instance sizes only)
//   centralized      single-swap local search; the comparison anchor
//   centralized_p2   pair-swap local search
//   distributed      message protocol at the scenario's radius factor
//   distributed_f2   message protocol pinned to radius factor 2
//   descent_own      in-cell descent scoring only the robot's own cell
//   descent_neighbor in-cell descent scoring the full objective
const std::vector<std::string>& canonical_solvers();
bool is_known_solver(const std::string& name);

struct Scenario {
  std::string id;
  uint64_t seed = 0;
  int m = 0;
  double radius_factor = 4.0;
  std::optional<double> epsilon0;  // nullopt = instance-scaled schedule
  Sensing sensing = Sensing::identity;
  std::vector<std::string> solvers;

  // init policy: "corner" | "random" | "explicit" | "" (default for the kind)
  std::string init_policy;
  std::optional<uint64_t> init_seed;  // random policy; defaults to the scenario seed
  std::vector<VertexId> init_positions;

  // instance: "environment" | "graph" | "gadget"
  std::string kind;
  nlohmann::ordered_json environment_json;
  double cell_size = 1.0;
  int fine_factor = 4;
  nlohmann::ordered_json graph_json;
  int gadget_n = 4;
  double gadget_eps = 0.5;
  double gadget_L = 10.0;

  long generation_attempts = 0;  // diagnostic from generate_random_scenario

  nlohmann::ordered_json to_json() const;
};

// Validates and fills defaults; errors name the offending field.
Scenario parse_scenario(const nlohmann::json& doc);

// Scenario made concrete: the graph, the starting configuration, and the
// improvement threshold. Environment scenarios keep their discretization so
// renderers can map vertices back to coordinates.
struct ResolvedInstance {
  MetricGraph graph;
  Configuration init;
  double eps0 = 0.0;
  std::optional<Environment> env;
  std::optional<Discretization> disc;
};

ResolvedInstance resolve_scenario(const Scenario& sc);

struct GeneratorTemplate {
  double width = 30.0;
  double height = 17.0;
  double cell_size = 1.0;
  int fine_factor = 4;
  int obstacle_count = 2;
  double obstacle_side_min = 3.0;
  double obstacle_side_max = 8.0;
  double margin = 1.0;
  int gaussians_min = 1;
  int gaussians_max = 3;
  double sigma_min = 20.0;  // variance of the isotropic components
  double sigma_max = 40.0;
  int m = 10;
  double radius_factor = 4.0;
  Sensing sensing = Sensing::identity;
  std::vector<std::string> solvers;  // empty = parse_scenario's default set

  static GeneratorTemplate from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

// Deterministic in (template, seed): rectangular obstacles inside the margin,
// an isotropic gaussian mixture, corner init. Redraws until the discretized
// free space is connected and holds at least m samples, recording the attempt
// count in the scenario.
Scenario generate_random_scenario(const GeneratorTemplate& tpl, uint64_t seed);

struct ReportRow {
  std::string scenario_id;
  std::string solver;
  bool failed = false;
  std::string error;
  double cost = 0.0;
  std::optional<double> pct_vs_centralized;
  long moves_type1 = 0;
  long moves_type2_single = 0;
  long moves_type2_multi = 0;
  long messages = 0;
  long iterations = 0;
  std::vector<double> cost_curve;           // initial cost, then after each accepted move
  std::vector<Configuration> trail;         // configurations along the same curve
  std::optional<double> wall_ms;            // only with RunOptions.timing
  std::string trace_jsonl;                  // only with RunOptions.keep_traces
};

// Geometry sidecar for environment scenarios so reports can be drawn without
// re-running the discretization.
struct ScenarioGeometry {
  std::string scenario_id;
  double width = 0.0;
  double height = 0.0;
  std::vector<std::vector<Point>> obstacles;
  std::vector<Point> samples;
};

struct Report {
  std::vector<ReportRow> rows;
  std::vector<ScenarioGeometry> geometry;

  nlohmann::ordered_json to_json() const;
  static Report from_json(const nlohmann::json& j);
};

struct RunOptions {
  bool timing = false;       // record wall clock (makes report bytes vary)
  bool keep_traces = false;  // retain protocol traces on distributed rows
};

// Runs every selected solver (the centralized anchor is always included) on
// each scenario; failures are recorded on their row and the batch continues.
Report run_experiment(const std::vector<Scenario>& batch, const RunOptions& opt = {});

// formats is a subset of {"csv","json","svg"}; returns the written paths.
// CSV columns: scenario_id, solver, cost, pct_vs_centralized, moves_type1,
// moves_type2_single, moves_type2_multi, messages.
std::vector<std::string> render_report(const Report& report, const std::vector<std::string>& formats,
                                       const std::string& out_dir);

std::string report_csv(const Report& report);

}  // namespace covctl
