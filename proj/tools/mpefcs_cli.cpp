#include "mpefcs/darp.hpp"
#include "mpefcs/generator.hpp"
#include "mpefcs/kpi.hpp"
#include "mpefcs/lns.hpp"
#include "mpefcs/milp_export.hpp"
#include "mpefcs/oracle.hpp"
#include "mpefcs/solution_io.hpp"
#include "mpefcs/sweep.hpp"
#include "mpefcs/validator.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace mpefcs;

namespace {

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << text;
}

void emit_json(const std::string& out, const json& j) { emit(out, j.dump(2) + "\n"); }

SearchConfig load_search(const std::string& path, std::optional<std::uint64_t> seed) {
  SearchConfig cfg = path.empty() ? SearchConfig{} : search_config_from_json(read_json_file(path));
  if (seed) cfg.seed = *seed;
  validate_search_config(cfg);
  return cfg;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meeting-point based electric feeder bus routing and charging"};
  app.require_subcommand(1);

  std::string instance_path, solution_path, config_path, out;
  std::optional<std::uint64_t> seed;
  auto common = [&](CLI::App* c, bool needs_instance) {
    c->add_option("--out,-o", out, "output file (default stdout)");
    c->add_option("--config,-c", config_path, "JSON configuration");
    c->add_option("--seed", seed, "seed override");
    if (needs_instance) c->add_option("--instance,-i", instance_path, "scenario JSON")->required();
  };

  auto* gen = app.add_subcommand("generate", "generate a case-study scenario");
  common(gen, false);

  auto* assign = app.add_subcommand("assign", "solve the meeting point assignment");
  common(assign, true);
  std::string method = "auto";
  std::optional<double> rho;
  assign->add_option("--method", method, "exact, heuristic or auto")->check(CLI::IsMember({"auto", "exact", "heuristic"}));
  assign->add_option("--rho", rho, "compactness weight");

  auto* solve = app.add_subcommand("solve", "run the large neighborhood search");
  common(solve, true);
  std::optional<int> runs;
  std::string keep = "best";
  solve->add_option("--runs", runs, "independent restarts");
  solve->add_option("--keep", keep, "which run to report")->check(CLI::IsMember({"best"}));

  auto* exact = app.add_subcommand("exact", "exhaustive optimum of a tiny instance");
  common(exact, true);
  std::uint64_t leaf_budget = 50'000'000;
  exact->add_option("--leaf-budget", leaf_budget, "maximum enumerated combinations");

  auto* validate = app.add_subcommand("validate", "check a solution against every constraint family");
  common(validate, true);
  validate->add_option("--solution,-s", solution_path, "solution JSON")->required();

  auto* kpi = app.add_subcommand("kpi", "report the KPI set of a solution");
  common(kpi, true);
  kpi->add_option("--solution,-s", solution_path, "solution JSON")->required();
  double cpu = 0.0;
  kpi->add_option("--cpu", cpu, "solve wall-clock seconds to report");

  auto* sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  common(sweep, false);
  int workers = 0;
  sweep->add_option("--workers", workers, "worker threads (default MPEFCS_WORKERS)");

  auto* milp = app.add_subcommand("export-milp", "write the routing or assignment model in LP format");
  common(milp, true);
  std::string manifest_path;
  bool assignment_model = false;
  ExportConfig ecfg;
  milp->add_option("--manifest", manifest_path, "row-family manifest JSON");
  milp->add_flag("--assignment", assignment_model, "export the assignment model instead");
  milp->add_option("--big-m1", ecfg.big_m1, "visit big-M");
  milp->add_option("--big-m2", ecfg.big_m2, "time big-M");
  milp->add_option("--format", ecfg.format, "output format")->check(CLI::IsMember({"lp"}));

  auto* darp = app.add_subcommand("darp", "door-to-door baseline against the meeting point service");
  common(darp, true);
  int fleet_cap = 40;
  bool compare = false;
  darp->add_option("--fleet-cap", fleet_cap, "door-to-door fleet size");
  darp->add_flag("--compare", compare, "also find the smallest meeting point fleet with full service");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      ScenarioConfig cfg = config_path.empty() ? ScenarioConfig{} : config_from_json(read_json_file(config_path));
      if (seed) cfg.seed = *seed;
      emit_json(out, scenario_to_json(generate_scenario(cfg)));
      return 0;
    }
    if (sweep->parsed()) {
      if (config_path.empty()) throw std::runtime_error("sweep needs --config");
      SweepSpec spec = sweep_spec_from_json(read_json_file(config_path));
      if (seed) spec.search.seed = *seed;
      if (workers > 0) spec.workers = workers;
      const SweepResult res = run_sweep(spec);
      std::ostringstream os;
      write_sweep_csv(os, spec, res);
      emit(out, os.str());
      return 0;
    }

    const Instance inst = load_instance(instance_path);
    if (assign->parsed()) {
      SearchConfig cfg = load_search(config_path, seed);
      if (method == "exact") cfg.assignment = AssignmentMethod::Exact;
      if (method == "heuristic") cfg.assignment = AssignmentMethod::Heuristic;
      if (rho) cfg.rho = *rho;
      AssignmentProblem prob;
      const AssignmentResult res = stage_one_assignment(inst, cfg, &prob);
      emit_json(out, assignment_to_json(prob, res));
    } else if (solve->parsed()) {
      SearchConfig cfg = load_search(config_path, seed);
      if (runs) cfg.restarts = *runs;
      validate_search_config(cfg);
      emit_json(out, solution_to_json(lns_solve(inst, cfg)));
    } else if (exact->parsed()) {
      const ExactResult res = solve_exact_tiny(inst, leaf_budget);
      json j = solution_to_json(res.solution);
      j["leaves"] = res.leaves;
      emit_json(out, j);
    } else if (validate->parsed()) {
      const auto violations = check_feasibility(solution_from_json(read_json_file(solution_path)), inst);
      json j = json::array();
      for (const auto& v : violations)
        j.push_back({{"family", v.family},
                     {"vehicle", v.vehicle},
                     {"stop", v.stop},
                     {"request", v.request},
                     {"slack", v.slack},
                     {"detail", v.detail}});
      emit_json(out, {{"feasible", violations.empty()}, {"violations", j}});
      return violations.empty() ? 0 : 1;
    } else if (kpi->parsed()) {
      emit_json(out, kpis_to_json(compute_kpis(solution_from_json(read_json_file(solution_path)), inst, cpu)));
    } else if (milp->parsed()) {
      MilpExport ex = assignment_model ? export_assignment_milp(make_assignment_problem(inst, inst.params().rho))
                                       : export_milp(inst, ecfg);
      emit(out, write_lp(ex.model));
      if (!manifest_path.empty()) write_json_file(manifest_path, ex.manifest);
    } else if (darp->parsed()) {
      DarpConfig dc;
      dc.search = load_search(config_path, seed);
      dc.fleet_cap = fleet_cap;
      const DarpResult d = solve_darp_baseline(inst, dc);
      json j = {{"darp", {{"kpis", kpis_to_json(d.kpis)}, {"solution", solution_to_json(d.solution)}}}};
      if (compare) {
        const auto t0 = std::chrono::steady_clock::now();
        const FleetSearchResult f = min_fleet_full_service(inst.scenario(), dc.search, 1, fleet_cap);
        j["mpefcs"] = {{"fleet", f.fleet}, {"kpis", kpis_to_json(f.kpis)}, {"search_seconds", seconds_since(t0)}};
      }
      emit_json(out, j);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
