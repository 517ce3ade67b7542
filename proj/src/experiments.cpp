#include "covctl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "covctl/gadget.hpp"
#include "covctl/rng.hpp"

namespace covctl {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fmt_double(double v, const char* spec) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fmt10(double v) { return fmt_double(v, "%.10g"); }
std::string fmt6(double v) { return fmt_double(v, "%.6g"); }

const std::vector<std::string>& default_solvers() {
  static const std::vector<std::string> names = {"distributed", "centralized", "descent_own", "descent_neighbor"};
  return names;
}

[[noreturn]] void bad_field(const std::string& what) { throw std::invalid_argument("scenario: " + what); }

double require_positive_number(const json& j, const std::string& field) {
  if (!j.is_number()) bad_field("\"" + field + "\" must be a number");
  const double v = j.get<double>();
  if (!(v > 0.0)) bad_field("\"" + field + "\" must be positive");
  return v;
}

}  // namespace

const std::vector<std::string>& canonical_solvers() {
  static const std::vector<std::string> names = {"brute_force",    "centralized", "centralized_p2", "distributed",
                                                 "distributed_f2", "descent_own", "descent_neighbor"};
  return names;
}

bool is_known_solver(const std::string& name) {
  const auto& all = canonical_solvers();
  return std::find(all.begin(), all.end(), name) != all.end();
}

ordered_json Scenario::to_json() const {
  ordered_json j;
  j["id"] = id;
  j["seed"] = seed;
  j["m"] = m;
  j["radius_factor"] = radius_factor;
  if (epsilon0)
    j["epsilon0"] = *epsilon0;
  else
    j["epsilon0"] = "auto";
  j["sensing"] = sensing_name(sensing);
  j["solvers"] = solvers;
  if (!init_policy.empty()) {
    ordered_json init;
    init["policy"] = init_policy;
    if (init_policy == "random" && init_seed) init["seed"] = *init_seed;
    if (init_policy == "explicit") init["positions"] = init_positions;
    j["init"] = init;
  }
  ordered_json inst;
  inst["kind"] = kind;
  if (kind == "environment") {
    inst["cell_size"] = cell_size;
    inst["fine_factor"] = fine_factor;
    inst["environment"] = environment_json;
  } else if (kind == "graph") {
    inst["graph"] = graph_json;
  } else if (kind == "gadget") {
    inst["n"] = gadget_n;
    inst["eps"] = gadget_eps;
    inst["L"] = gadget_L;
  }
  j["instance"] = inst;
  if (generation_attempts > 0) j["generation_attempts"] = generation_attempts;
  return j;
}

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) bad_field("document must be a JSON object");
  Scenario sc;

  if (!doc.contains("m")) bad_field("missing required field \"m\"");
  if (!doc["m"].is_number_integer() || doc["m"].get<long long>() < 1)
    bad_field("\"m\" must be a positive integer");
  sc.m = doc["m"].get<int>();

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) bad_field("\"seed\" must be an integer");
    sc.seed = doc["seed"].get<uint64_t>();
  }
  if (doc.contains("id")) {
    if (!doc["id"].is_string()) bad_field("\"id\" must be a string");
    sc.id = doc["id"].get<std::string>();
  } else {
    sc.id = "scenario-" + std::to_string(sc.seed);
  }

  if (doc.contains("radius_factor")) sc.radius_factor = require_positive_number(doc["radius_factor"], "radius_factor");

  if (doc.contains("epsilon0")) {
    const json& e = doc["epsilon0"];
    if (e.is_string()) {
      if (e.get<std::string>() != "auto") bad_field("\"epsilon0\" must be a positive number or \"auto\"");
    } else {
      sc.epsilon0 = require_positive_number(e, "epsilon0");
    }
  }

  if (doc.contains("sensing")) {
    if (!doc["sensing"].is_string()) bad_field("\"sensing\" must be a string");
    try {
      sc.sensing = sensing_from_name(doc["sensing"].get<std::string>());
    } catch (const std::exception&) {
      bad_field("unknown value in \"sensing\"");
    }
  }

  if (doc.contains("solvers")) {
    if (!doc["solvers"].is_array() || doc["solvers"].empty()) bad_field("\"solvers\" must be a nonempty array");
    for (const json& s : doc["solvers"]) {
      if (!s.is_string() || !is_known_solver(s.get<std::string>()))
        bad_field("unknown solver in \"solvers\": " + s.dump());
      sc.solvers.push_back(s.get<std::string>());
    }
  } else {
    sc.solvers = default_solvers();
  }

  if (doc.contains("init")) {
    const json& init = doc["init"];
    if (!init.is_object() || !init.contains("policy") || !init["policy"].is_string())
      bad_field("\"init.policy\" must be one of corner, random, explicit");
    sc.init_policy = init["policy"].get<std::string>();
    if (sc.init_policy != "corner" && sc.init_policy != "random" && sc.init_policy != "explicit")
      bad_field("\"init.policy\" must be one of corner, random, explicit");
    if (sc.init_policy == "random" && init.contains("seed")) {
      if (!init["seed"].is_number_integer()) bad_field("\"init.seed\" must be an integer");
      sc.init_seed = init["seed"].get<uint64_t>();
    }
    if (sc.init_policy == "explicit") {
      if (!init.contains("positions") || !init["positions"].is_array())
        bad_field("\"init.positions\" must be an array of vertex ids");
      for (const json& p : init["positions"]) {
        if (!p.is_number_integer()) bad_field("\"init.positions\" must be an array of vertex ids");
        sc.init_positions.push_back(p.get<VertexId>());
      }
    }
  }

  if (!doc.contains("instance")) bad_field("missing required field \"instance\"");
  const json& inst = doc["instance"];
  if (!inst.is_object() || !inst.contains("kind") || !inst["kind"].is_string())
    bad_field("\"instance.kind\" must be one of environment, graph, gadget");
  sc.kind = inst["kind"].get<std::string>();
  if (sc.kind == "environment") {
    if (!inst.contains("environment") || !inst["environment"].is_object())
      bad_field("\"instance.environment\" must be an object");
    // Canonicalize through the environment parser so the scenario re-emits
    // byte-identically no matter how the caller ordered the document.
    try {
      sc.environment_json = Environment::from_json(inst["environment"]).to_json();
    } catch (const std::exception& e) {
      bad_field(std::string("\"instance.environment\": ") + e.what());
    }
    if (inst.contains("cell_size")) sc.cell_size = require_positive_number(inst["cell_size"], "instance.cell_size");
    if (inst.contains("fine_factor")) {
      if (!inst["fine_factor"].is_number_integer() || inst["fine_factor"].get<int>() < 4)
        bad_field("\"instance.fine_factor\" must be an integer >= 4");
      sc.fine_factor = inst["fine_factor"].get<int>();
    }
  } else if (sc.kind == "graph") {
    if (!inst.contains("graph") || !inst["graph"].is_object()) bad_field("\"instance.graph\" must be an object");
    sc.graph_json = inst["graph"];
  } else if (sc.kind == "gadget") {
    if (inst.contains("n")) {
      if (!inst["n"].is_number_integer() || inst["n"].get<int>() < 2)
        bad_field("\"instance.n\" must be an integer >= 2");
      sc.gadget_n = inst["n"].get<int>();
    }
    if (inst.contains("eps")) {
      const double e = require_positive_number(inst["eps"], "instance.eps");
      if (e >= 1.0) bad_field("\"instance.eps\" must be inside (0, 1)");
      sc.gadget_eps = e;
    }
    if (inst.contains("L")) {
      const double L = require_positive_number(inst["L"], "instance.L");
      if (L <= 2.0) bad_field("\"instance.L\" must be greater than 2");
      sc.gadget_L = L;
    }
  } else {
    bad_field("\"instance.kind\" must be one of environment, graph, gadget");
  }

  if (doc.contains("generation_attempts")) sc.generation_attempts = doc["generation_attempts"].get<long>();
  return sc;
}

ResolvedInstance resolve_scenario(const Scenario& sc) {
  ResolvedInstance out{MetricGraph::from_cost_matrix({1.0}, {0.0}), Configuration{}, 0.0, std::nullopt, std::nullopt};
  std::vector<VertexId> gadget_init;
  if (sc.kind == "graph") {
    out.graph = MetricGraph::from_json(sc.graph_json);
  } else if (sc.kind == "gadget") {
    GadgetInstance gi = gen_gadget_instance(sc.gadget_n, sc.gadget_eps, sc.gadget_L);
    out.graph = gi.graph;
    gadget_init = gi.bad_config.positions;
  } else if (sc.kind == "environment") {
    out.env = Environment::from_json(sc.environment_json);
    out.disc = grid_sample(*out.env, sc.cell_size, sc.fine_factor);
    out.graph = build_coverage_graph(*out.disc, sc.sensing);
  } else {
    throw std::invalid_argument("scenario " + sc.id + ": unknown instance kind \"" + sc.kind + "\"");
  }

  const int n = out.graph.vertex_count();
  std::string policy = sc.init_policy;
  if (policy.empty()) policy = sc.kind == "environment" ? "corner" : (sc.kind == "gadget" ? "explicit" : "random");

  if (policy == "corner") {
    if (!out.disc)
      throw std::invalid_argument("scenario " + sc.id + ": corner init requires an environment instance");
    if (sc.m > n)
      throw std::invalid_argument("scenario " + sc.id + ": \"m\" exceeds the sample count for corner init");
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    const auto& pts = out.disc->samples;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const double da = pts[static_cast<std::size_t>(a)].x * pts[static_cast<std::size_t>(a)].x +
                        pts[static_cast<std::size_t>(a)].y * pts[static_cast<std::size_t>(a)].y;
      const double db = pts[static_cast<std::size_t>(b)].x * pts[static_cast<std::size_t>(b)].x +
                        pts[static_cast<std::size_t>(b)].y * pts[static_cast<std::size_t>(b)].y;
      return da < db;
    });
    out.init.positions.assign(order.begin(), order.begin() + sc.m);
  } else if (policy == "random") {
    Rng rng(sc.init_seed ? *sc.init_seed : sc.seed);
    for (int i = 0; i < sc.m; ++i) out.init.positions.push_back(rng.uniform_int(0, n - 1));
  } else {  // explicit
    std::vector<VertexId> pos = sc.init_positions;
    if (pos.empty() && sc.kind == "gadget") pos = gadget_init;
    if (static_cast<int>(pos.size()) != sc.m)
      throw std::invalid_argument("scenario " + sc.id + ": \"init.positions\" must list exactly m vertices");
    for (VertexId v : pos)
      if (v < 0 || v >= n)
        throw std::invalid_argument("scenario " + sc.id + ": \"init.positions\" contains invalid vertex " +
                                    std::to_string(v));
    out.init.positions = pos;
  }

  out.eps0 = sc.epsilon0 ? *sc.epsilon0 : epsilon0_schedule(out.graph, sc.m);
  return out;
}

GeneratorTemplate GeneratorTemplate::from_json(const json& j) {
  GeneratorTemplate t;
  if (j.is_null()) return t;
  if (!j.is_object()) throw std::invalid_argument("template: document must be a JSON object");
  auto num = [&](const char* key, double& slot) {
    if (j.contains(key)) slot = require_positive_number(j[key], key);
  };
  num("width", t.width);
  num("height", t.height);
  num("cell_size", t.cell_size);
  num("margin", t.margin);
  num("radius_factor", t.radius_factor);
  if (j.contains("fine_factor")) t.fine_factor = j["fine_factor"].get<int>();
  if (j.contains("obstacles")) t.obstacle_count = j["obstacles"].get<int>();
  if (j.contains("obstacle_side")) {
    t.obstacle_side_min = j["obstacle_side"].at(0).get<double>();
    t.obstacle_side_max = j["obstacle_side"].at(1).get<double>();
  }
  if (j.contains("gaussians")) {
    t.gaussians_min = j["gaussians"].at(0).get<int>();
    t.gaussians_max = j["gaussians"].at(1).get<int>();
  }
  if (j.contains("sigma")) {
    t.sigma_min = j["sigma"].at(0).get<double>();
    t.sigma_max = j["sigma"].at(1).get<double>();
  }
  if (j.contains("m")) t.m = j["m"].get<int>();
  if (j.contains("sensing")) t.sensing = sensing_from_name(j["sensing"].get<std::string>());
  if (j.contains("solvers"))
    for (const json& s : j["solvers"]) {
      if (!s.is_string() || !is_known_solver(s.get<std::string>()))
        throw std::invalid_argument("template: unknown solver in \"solvers\": " + s.dump());
      t.solvers.push_back(s.get<std::string>());
    }
  return t;
}

ordered_json GeneratorTemplate::to_json() const {
  ordered_json j;
  j["width"] = width;
  j["height"] = height;
  j["cell_size"] = cell_size;
  j["fine_factor"] = fine_factor;
  j["obstacles"] = obstacle_count;
  j["obstacle_side"] = {obstacle_side_min, obstacle_side_max};
  j["margin"] = margin;
  j["gaussians"] = {gaussians_min, gaussians_max};
  j["sigma"] = {sigma_min, sigma_max};
  j["m"] = m;
  j["radius_factor"] = radius_factor;
  j["sensing"] = sensing_name(sensing);
  if (!solvers.empty()) j["solvers"] = solvers;
  return j;
}

Scenario generate_random_scenario(const GeneratorTemplate& tpl, uint64_t seed) {
  if (tpl.m < 1) throw std::invalid_argument("template: \"m\" must be positive");
  if (tpl.obstacle_side_max + 2.0 * tpl.margin >= std::min(tpl.width, tpl.height))
    throw std::invalid_argument("template: obstacles do not fit inside the margins");
  Rng rng(seed);
  const int max_attempts = 64;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    std::vector<std::vector<Point>> obstacles;
    for (int k = 0; k < tpl.obstacle_count; ++k) {
      const double w = rng.uniform(tpl.obstacle_side_min, tpl.obstacle_side_max);
      const double h = rng.uniform(tpl.obstacle_side_min, tpl.obstacle_side_max);
      const double x0 = rng.uniform(tpl.margin, tpl.width - tpl.margin - w);
      const double y0 = rng.uniform(tpl.margin, tpl.height - tpl.margin - h);
      obstacles.push_back({{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + h}, {x0, y0 + h}});
    }
    const int ncomp = rng.uniform_int(tpl.gaussians_min, tpl.gaussians_max);
    std::vector<Density::Gaussian> comps;
    for (int k = 0; k < ncomp; ++k) {
      Density::Gaussian gsn;
      gsn.mean = {rng.uniform(0.0, tpl.width), rng.uniform(0.0, tpl.height)};
      const double sigma = rng.uniform(tpl.sigma_min, tpl.sigma_max);
      gsn.cov = {sigma, 0.0, 0.0, sigma};
      gsn.weight = 1.0;
      comps.push_back(gsn);
    }
    Environment env(tpl.width, tpl.height, obstacles, Density::mixture(comps));
    try {
      const Discretization disc = grid_sample(env, tpl.cell_size, tpl.fine_factor);
      if (static_cast<int>(disc.samples.size()) < tpl.m) continue;  // too little free space; redraw
    } catch (const std::runtime_error&) {
      continue;  // disconnected or fully blocked free space; redraw
    }
    Scenario sc;
    sc.id = "rand-" + std::to_string(seed);
    sc.seed = seed;
    sc.m = tpl.m;
    sc.radius_factor = tpl.radius_factor;
    sc.sensing = tpl.sensing;
    sc.solvers = tpl.solvers.empty() ? default_solvers() : tpl.solvers;
    sc.init_policy = "corner";
    sc.kind = "environment";
    sc.environment_json = env.to_json();
    sc.cell_size = tpl.cell_size;
    sc.fine_factor = tpl.fine_factor;
    sc.generation_attempts = attempt;
    return sc;
  }
  throw std::runtime_error("generate_random_scenario: no connected draw after " + std::to_string(max_attempts) +
                           " attempts for seed " + std::to_string(seed));
}

namespace {

ReportRow run_single_solver(const Scenario& sc, const ResolvedInstance& inst, const std::string& solver,
                            double initial_cost, const RunOptions& opt) {
  ReportRow row;
  row.scenario_id = sc.id;
  row.solver = solver;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (solver == "brute_force") {
      const SolveResult res = brute_force_optimum(inst.graph, sc.m);
      row.cost = res.cost;
      row.iterations = res.iterations;
      row.cost_curve = {res.cost};
      row.trail = {res.config};
    } else if (solver == "distributed" || solver == "distributed_f2") {
      DistributedOptions dopt;
      dopt.eps0 = inst.eps0;
      dopt.radius_factor = solver == "distributed_f2" ? 2.0 : sc.radius_factor;
      auto [res, trace] = run_distributed(inst.graph, inst.init, dopt);
      row.cost = res.cost;
      row.iterations = res.iterations;
      row.moves_type1 = trace.shares.type1;
      row.moves_type2_single = trace.shares.type2_single;
      row.moves_type2_multi = trace.shares.type2_multi;
      row.messages = trace.messages_total;
      row.cost_curve.push_back(initial_cost);
      for (double c : trace.cost_curve) row.cost_curve.push_back(c);
      row.trail.push_back(inst.init);
      for (const auto& h : res.history) row.trail.push_back(h.first);
      if (opt.keep_traces) {
        std::ostringstream os;
        trace.write_jsonl(os);
        row.trace_jsonl = os.str();
      }
    } else {
      SolveResult res;
      if (solver == "centralized")
        res = centralized_local_search(inst.graph, sc.m, 1, inst.eps0, inst.init);
      else if (solver == "centralized_p2")
        res = centralized_local_search(inst.graph, sc.m, 2, inst.eps0, inst.init);
      else if (solver == "descent_own")
        res = descent_baseline(inst.graph, sc.m, inst.eps0, inst.init, DescentMode::own_partition);
      else if (solver == "descent_neighbor")
        res = descent_baseline(inst.graph, sc.m, inst.eps0, inst.init, DescentMode::neighbor_aware);
      else
        throw std::invalid_argument("unknown solver \"" + solver + "\"");
      row.cost = res.cost;
      row.iterations = res.iterations;
      row.moves_type1 = res.iterations;  // every accepted move is a single relocation
      row.cost_curve.push_back(initial_cost);
      row.trail.push_back(inst.init);
      for (const auto& h : res.history) {
        row.trail.push_back(h.first);
        row.cost_curve.push_back(h.second);
      }
    }
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
  }
  if (opt.timing) {
    const auto t1 = std::chrono::steady_clock::now();
    row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  return row;
}

}  // namespace

Report run_experiment(const std::vector<Scenario>& batch, const RunOptions& opt) {
  Report rep;
  for (const Scenario& sc : batch) {
    // Row order is canonical; the centralized anchor always runs.
    std::set<std::string> wanted(sc.solvers.begin(), sc.solvers.end());
    wanted.insert("centralized");
    std::vector<std::string> order;
    for (const std::string& s : canonical_solvers())
      if (wanted.count(s)) order.push_back(s);

    ResolvedInstance inst{MetricGraph::from_cost_matrix({1.0}, {0.0}), Configuration{}, 0.0, std::nullopt,
                          std::nullopt};
    bool resolved = false;
    std::string resolve_error;
    try {
      inst = resolve_scenario(sc);
      resolved = true;
    } catch (const std::exception& e) {
      resolve_error = e.what();
    }

    const std::size_t first_row = rep.rows.size();
    if (!resolved) {
      for (const std::string& s : order) {
        ReportRow row;
        row.scenario_id = sc.id;
        row.solver = s;
        row.failed = true;
        row.error = resolve_error;
        rep.rows.push_back(row);
      }
      continue;
    }

    if (inst.env && inst.disc) {
      ScenarioGeometry geo;
      geo.scenario_id = sc.id;
      geo.width = inst.env->width();
      geo.height = inst.env->height();
      geo.obstacles = inst.env->obstacles();
      geo.samples = inst.disc->samples;
      rep.geometry.push_back(geo);
    }

    const double initial_cost = coverage_cost(inst.graph, inst.init);
    for (const std::string& s : order) rep.rows.push_back(run_single_solver(sc, inst, s, initial_cost, opt));

    double anchor = 0.0;
    bool have_anchor = false;
    for (std::size_t r = first_row; r < rep.rows.size(); ++r)
      if (rep.rows[r].solver == "centralized" && !rep.rows[r].failed) {
        anchor = rep.rows[r].cost;
        have_anchor = true;
      }
    if (have_anchor && anchor > 0.0)
      for (std::size_t r = first_row; r < rep.rows.size(); ++r)
        if (!rep.rows[r].failed) rep.rows[r].pct_vs_centralized = 100.0 * (rep.rows[r].cost - anchor) / anchor;
  }
  return rep;
}

ordered_json Report::to_json() const {
  ordered_json j;
  j["rows"] = ordered_json::array();
  for (const ReportRow& r : rows) {
    ordered_json row;
    row["scenario_id"] = r.scenario_id;
    row["solver"] = r.solver;
    if (r.failed) {
      row["error"] = r.error;
      j["rows"].push_back(row);
      continue;
    }
    row["cost"] = r.cost;
    if (r.pct_vs_centralized)
      row["pct_vs_centralized"] = *r.pct_vs_centralized;
    else
      row["pct_vs_centralized"] = nullptr;
    row["moves_type1"] = r.moves_type1;
    row["moves_type2_single"] = r.moves_type2_single;
    row["moves_type2_multi"] = r.moves_type2_multi;
    row["messages"] = r.messages;
    row["iterations"] = r.iterations;
    row["cost_curve"] = r.cost_curve;
    ordered_json trail = ordered_json::array();
    for (const Configuration& q : r.trail) trail.push_back(q.positions);
    row["trail"] = trail;
    if (r.wall_ms) row["wall_ms"] = *r.wall_ms;
    j["rows"].push_back(row);
  }

  ordered_json agg;
  for (const std::string& s : canonical_solvers()) {
    long count = 0, failures = 0;
    double cost_sum = 0.0, pct_sum = 0.0;
    long pct_count = 0;
    for (const ReportRow& r : rows) {
      if (r.solver != s) continue;
      if (r.failed) {
        ++failures;
        continue;
      }
      ++count;
      cost_sum += r.cost;
      if (r.pct_vs_centralized) {
        pct_sum += *r.pct_vs_centralized;
        ++pct_count;
      }
    }
    if (count + failures == 0) continue;
    ordered_json a;
    a["scenarios"] = count;
    a["failures"] = failures;
    if (count > 0)
      a["mean_cost"] = cost_sum / static_cast<double>(count);
    else
      a["mean_cost"] = nullptr;
    if (pct_count > 0)
      a["mean_pct_vs_centralized"] = pct_sum / static_cast<double>(pct_count);
    else
      a["mean_pct_vs_centralized"] = nullptr;
    agg[s] = a;
  }
  j["aggregates"] = agg;

  ordered_json geo = ordered_json::array();
  for (const ScenarioGeometry& g : geometry) {
    ordered_json e;
    e["scenario_id"] = g.scenario_id;
    e["width"] = g.width;
    e["height"] = g.height;
    ordered_json obs = ordered_json::array();
    for (const auto& ring : g.obstacles) {
      ordered_json r = ordered_json::array();
      for (const Point& p : ring) r.push_back({p.x, p.y});
      obs.push_back(r);
    }
    e["obstacles"] = obs;
    ordered_json samples = ordered_json::array();
    for (const Point& p : g.samples) samples.push_back({p.x, p.y});
    e["samples"] = samples;
    geo.push_back(e);
  }
  j["geometry"] = geo;
  return j;
}

Report Report::from_json(const json& j) {
  Report rep;
  if (!j.is_object() || !j.contains("rows")) throw std::invalid_argument("report: missing \"rows\"");
  for (const json& row : j["rows"]) {
    ReportRow r;
    r.scenario_id = row.at("scenario_id").get<std::string>();
    r.solver = row.at("solver").get<std::string>();
    if (row.contains("error")) {
      r.failed = true;
      r.error = row["error"].get<std::string>();
      rep.rows.push_back(r);
      continue;
    }
    r.cost = row.at("cost").get<double>();
    if (row.contains("pct_vs_centralized") && !row["pct_vs_centralized"].is_null())
      r.pct_vs_centralized = row["pct_vs_centralized"].get<double>();
    r.moves_type1 = row.at("moves_type1").get<long>();
    r.moves_type2_single = row.at("moves_type2_single").get<long>();
    r.moves_type2_multi = row.at("moves_type2_multi").get<long>();
    r.messages = row.at("messages").get<long>();
    r.iterations = row.at("iterations").get<long>();
    for (const json& c : row.at("cost_curve")) r.cost_curve.push_back(c.get<double>());
    for (const json& q : row.at("trail")) {
      Configuration cfg;
      for (const json& v : q) cfg.positions.push_back(v.get<VertexId>());
      r.trail.push_back(cfg);
    }
    if (row.contains("wall_ms")) r.wall_ms = row["wall_ms"].get<double>();
    rep.rows.push_back(r);
  }
  if (j.contains("geometry"))
    for (const json& e : j["geometry"]) {
      ScenarioGeometry g;
      g.scenario_id = e.at("scenario_id").get<std::string>();
      g.width = e.at("width").get<double>();
      g.height = e.at("height").get<double>();
      for (const json& ring : e.at("obstacles")) {
        std::vector<Point> poly;
        for (const json& p : ring) poly.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        g.obstacles.push_back(poly);
      }
      for (const json& p : e.at("samples")) g.samples.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      rep.geometry.push_back(g);
    }
  return rep;
}

std::string report_csv(const Report& report) {
  std::ostringstream os;
  os << "scenario_id,solver,cost,pct_vs_centralized,moves_type1,moves_type2_single,moves_type2_multi,messages\n";
  for (const ReportRow& r : report.rows) {
    os << r.scenario_id << ',' << r.solver << ',';
    if (!r.failed) {
      os << fmt10(r.cost) << ',';
      if (r.pct_vs_centralized) os << fmt10(*r.pct_vs_centralized);
      os << ',' << r.moves_type1 << ',' << r.moves_type2_single << ',' << r.moves_type2_multi << ',' << r.messages;
    } else {
      os << ",,,,,";
    }
    os << '\n';
  }
  return os.str();
}

namespace {

const char* robot_color(int robot) {
  static const char* palette[10] = {"#4363d8", "#e6194b", "#3cb44b", "#f58231", "#911eb4",
                                    "#46f0f0", "#f032e6", "#bcf60c", "#996633", "#008080"};
  return palette[robot % 10];
}

std::string render_svg(const ScenarioGeometry& geo, const ReportRow& row) {
  const double scale = std::max(geo.width, geo.height) / 40.0;
  const double pad = 1.0 + 2.0 * scale;
  std::ostringstream os;
  const double vw = geo.width + 2.0 * pad;
  const double vh = geo.height + 2.0 * pad;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt6(-pad) << ' ' << fmt6(-pad) << ' ' << fmt6(vw)
     << ' ' << fmt6(vh) << "\" width=\"720\" height=\"" << fmt6(720.0 * vh / vw) << "\">\n";
  os << "<g transform=\"translate(0," << fmt6(geo.height) << ") scale(1,-1)\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fmt6(geo.width) << "\" height=\"" << fmt6(geo.height)
     << "\" fill=\"#f7f7f4\" stroke=\"#444444\" stroke-width=\"" << fmt6(0.1 * scale) << "\"/>\n";
  for (const auto& ring : geo.obstacles) {
    os << "<polygon points=\"";
    for (std::size_t i = 0; i < ring.size(); ++i) {
      if (i) os << ' ';
      os << fmt6(ring[i].x) << ',' << fmt6(ring[i].y);
    }
    os << "\" fill=\"#b9b9b2\" stroke=\"#444444\" stroke-width=\"" << fmt6(0.05 * scale) << "\"/>\n";
  }
  for (const Point& p : geo.samples)
    os << "<circle cx=\"" << fmt6(p.x) << "\" cy=\"" << fmt6(p.y) << "\" r=\"" << fmt6(0.07 * scale)
       << "\" fill=\"#c9d2e4\"/>\n";

  const int m = row.trail.empty() ? 0 : row.trail.front().size();
  for (int robot = 0; robot < m; ++robot) {
    bool moved = false;
    for (const Configuration& q : row.trail)
      if (q.at(robot) != row.trail.front().at(robot)) moved = true;
    if (moved && row.trail.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << robot_color(robot) << "\" stroke-width=\"" << fmt6(0.12 * scale)
         << "\" stroke-linejoin=\"round\" points=\"";
      for (std::size_t t = 0; t < row.trail.size(); ++t) {
        const Point p = geo.samples[static_cast<std::size_t>(row.trail[t].at(robot))];
        if (t) os << ' ';
        os << fmt6(p.x) << ',' << fmt6(p.y);
      }
      os << "\"/>\n";
    }
  }
  for (int robot = 0; robot < m; ++robot) {
    const Point s = geo.samples[static_cast<std::size_t>(row.trail.front().at(robot))];
    os << "<circle cx=\"" << fmt6(s.x) << "\" cy=\"" << fmt6(s.y) << "\" r=\"" << fmt6(0.16 * scale)
       << "\" fill=\"none\" stroke=\"" << robot_color(robot) << "\" stroke-width=\"" << fmt6(0.06 * scale)
       << "\"/>\n";
    const Point f = geo.samples[static_cast<std::size_t>(row.trail.back().at(robot))];
    os << "<circle cx=\"" << fmt6(f.x) << "\" cy=\"" << fmt6(f.y) << "\" r=\"" << fmt6(0.26 * scale) << "\" fill=\""
       << robot_color(robot) << "\" stroke=\"#222222\" stroke-width=\"" << fmt6(0.05 * scale) << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("render_report: cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("render_report: write failed for " + path);
}

}  // namespace

std::vector<std::string> render_report(const Report& report, const std::vector<std::string>& formats,
                                       const std::string& out_dir) {
  bool want_csv = false, want_json = false, want_svg = false;
  for (const std::string& f : formats) {
    if (f == "csv")
      want_csv = true;
    else if (f == "json")
      want_json = true;
    else if (f == "svg")
      want_svg = true;
    else
      throw std::invalid_argument("render_report: unknown format \"" + f + "\"");
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  if (want_csv) {
    const std::string path = (std::filesystem::path(out_dir) / "report.csv").string();
    write_file(path, report_csv(report));
    written.push_back(path);
  }
  if (want_json) {
    const std::string path = (std::filesystem::path(out_dir) / "report.json").string();
    write_file(path, report.to_json().dump(2) + "\n");
    written.push_back(path);
  }
  if (want_svg) {
    for (const ReportRow& row : report.rows) {
      if (row.failed || row.trail.empty()) continue;
      const ScenarioGeometry* geo = nullptr;
      for (const ScenarioGeometry& g : report.geometry)
        if (g.scenario_id == row.scenario_id) geo = &g;
      if (!geo) continue;
      const std::string path =
          (std::filesystem::path(out_dir) / (row.scenario_id + "_" + row.solver + ".svg")).string();
      write_file(path, render_svg(*geo, row));
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace covctl
