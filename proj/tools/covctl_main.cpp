#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "covctl/experiments.hpp"
#include "covctl/verification.hpp"
#include "json.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coverage-control toolkit: scenario generation, solver batches, reports"};
  app.require_subcommand(1);

  // gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate seeded random scenarios from a template");
  std::string gen_template;
  std::string gen_out = ".";
  uint64_t gen_seed = 1;
  int gen_count = 20;
  gen->add_option("--template", gen_template, "template JSON file (defaults omit it)");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--seed", gen_seed, "base seed; scenario k uses seed base+k");
  gen->add_option("--count", gen_count, "number of scenarios")->check(CLI::PositiveNumber);

  // run ----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "run solver batches over scenario files");
  std::vector<std::string> run_files;
  std::string run_out = ".";
  std::vector<std::string> run_formats = {"csv", "json"};
  bool run_timing = false;
  bool run_traces = false;
  std::optional<double> run_factor;
  std::string run_eps = "";
  run->add_option("scenarios", run_files, "scenario JSON files")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "output directory");
  run->add_option("--formats", run_formats, "report formats: csv, json, svg")->delimiter(',');
  run->add_flag("--timing", run_timing, "record wall-clock per row (report bytes become run-dependent)");
  run->add_flag("--traces", run_traces, "write per-run protocol traces (JSON lines)");
  run->add_option("--factor", run_factor, "override the radius factor")->check(CLI::IsMember({2.0, 4.0}));
  run->add_option("--epsilon0", run_eps, "override the improvement threshold: a positive real or 'auto'");

  // verify -------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "run the acceptance suites and print one line per criterion");

  // render -------------------------------------------------------------
  auto* render = app.add_subcommand("render", "re-render a stored report to CSV/JSON/SVG");
  std::string render_report_path;
  std::string render_out = ".";
  std::vector<std::string> render_formats = {"csv", "json", "svg"};
  render->add_option("--report", render_report_path, "report JSON produced by 'run'")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("--out", render_out, "output directory");
  render->add_option("--formats", render_formats, "formats: csv, json, svg")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      covctl::GeneratorTemplate tpl;
      if (!gen_template.empty()) tpl = covctl::GeneratorTemplate::from_json(load_json(gen_template));
      std::filesystem::create_directories(gen_out);
      for (int k = 0; k < gen_count; ++k) {
        const covctl::Scenario sc = covctl::generate_random_scenario(tpl, gen_seed + static_cast<uint64_t>(k));
        const std::string path = (std::filesystem::path(gen_out) / (sc.id + ".json")).string();
        write_text(path, sc.to_json().dump(2) + "\n");
        std::cout << path << "\n";
      }
      return 0;
    }

    if (run->parsed()) {
      std::vector<covctl::Scenario> batch;
      for (const std::string& f : run_files) {
        covctl::Scenario sc = covctl::parse_scenario(load_json(f));
        if (run_factor) sc.radius_factor = *run_factor;
        if (!run_eps.empty()) {
          if (run_eps == "auto")
            sc.epsilon0.reset();
          else
            sc.epsilon0 = std::stod(run_eps);
        }
        batch.push_back(std::move(sc));
      }
      covctl::RunOptions opt;
      opt.timing = run_timing;
      opt.keep_traces = run_traces;
      const covctl::Report rep = covctl::run_experiment(batch, opt);
      for (const std::string& path : covctl::render_report(rep, run_formats, run_out)) std::cout << path << "\n";
      if (run_traces) {
        for (const covctl::ReportRow& row : rep.rows) {
          if (row.trace_jsonl.empty()) continue;
          const std::string path =
              (std::filesystem::path(run_out) / (row.scenario_id + "_" + row.solver + ".trace.jsonl")).string();
          write_text(path, row.trace_jsonl);
          std::cout << path << "\n";
        }
      }
      int failures = 0;
      for (const covctl::ReportRow& row : rep.rows)
        if (row.failed) {
          ++failures;
          std::cerr << "row failed: " << row.scenario_id << "/" << row.solver << ": " << row.error << "\n";
        }
      return failures == 0 ? 0 : 1;
    }

    if (verify->parsed()) {
      const auto results = covctl::run_acceptance(&std::cout);
      const bool ok = covctl::all_passed(results);
      std::cout << (ok ? "all criteria passed" : "some criteria FAILED") << std::endl;
      return ok ? 0 : 1;
    }

    if (render->parsed()) {
      const covctl::Report rep = covctl::Report::from_json(load_json(render_report_path));
      for (const std::string& path : covctl::render_report(rep, render_formats, render_out))
        std::cout << path << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
