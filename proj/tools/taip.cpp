// taip: solve, inspect and benchmark team-allocation instances.
//
//   taip generate-ontology --seed 1 --branching 3 --depth 4 --out ont.json
//   taip generate --programs 10 --seed 7 --out instance.json
//   taip solve --instance instance.json --seed 42 --out out.json --trace t.csv
//   taip exact --instance instance.json --out exact.json
//   taip count --instance instance.json
//   taip export-lp --instance instance.json --objective log1p --out model.lp
//   taip bench --instances 'data/*.json' --seeds 1,2,3 --report report/
//   taip hardness-curve --out curve.csv

#include <CLI11.hpp>

#include <filesystem>
#include <fnmatch.h>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "taip/benchmark.hpp"
#include "taip/generator.hpp"
#include "taip/io.hpp"
#include "taip/oracle.hpp"
#include "taip/solver.hpp"

namespace fs = std::filesystem;

namespace {

taip::Instance load_checked(const std::string& path) {
  taip::Instance inst = taip::load_instance(path);
  auto rep = taip::validate_instance(inst);
  if (!rep.ok()) {
    std::cerr << "invalid instance '" << path << "':\n";
    for (const auto& v : rep.errors)
      std::cerr << "  [" << v.code << "] " << v.message << '\n';
    throw CLI::RuntimeError(2);
  }
  return inst;
}

// Expands a glob in the final path component; other components are literal.
std::vector<std::string> expand_glob(const std::string& pattern) {
  const fs::path p(pattern);
  const fs::path dir = p.parent_path().empty() ? "." : p.parent_path();
  const std::string leaf = p.filename().string();
  std::vector<std::string> out;
  if (leaf.find_first_of("*?[") == std::string::npos) {
    out.push_back(pattern);
    return out;
  }
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (fnmatch(leaf.c_str(), name.c_str(), 0) == 0)
      out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void add_solver_flags(CLI::App* cmd, taip::SolverConfig& cfg,
                      std::string& hardness_mode) {
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--epsilon", cfg.convergence_epsilon,
                  "stop once 1 - overall_cp <= epsilon");
  cmd->add_option("--patience", cfg.patience,
                  "iterations without improvement before stopping");
  cmd->add_option("--local-search-period", cfg.local_search_period,
                  "iterations between local-search sweeps");
  cmd->add_option("--swap-attempts", cfg.swap_attempts,
                  "random swap attempts per non-crossover iteration");
  cmd->add_option("--hausdorff-threshold", cfg.hausdorff_threshold,
                  "minimum competence-set similarity for a crossover");
  cmd->add_option_function<double>(
      "--hardness-guard",
      [&cfg](const double& v) { cfg.hardness_guard = v; },
      "skip programs whose hardness reaches this bound");
  cmd->add_option_function<std::uint64_t>(
      "--max-iterations",
      [&cfg](const std::uint64_t& v) { cfg.max_iterations = v; },
      "iteration cap");
  cmd->add_option_function<double>(
      "--time-budget",
      [&cfg](const double& v) { cfg.time_budget_seconds = v; },
      "wall-clock budget in seconds");
  cmd->add_option("--program-hardness", hardness_mode,
                  "program hardness aggregation: as-written | weighted-mean")
      ->check(CLI::IsMember({"as-written", "weighted-mean"}));
  cmd->add_option("--hardness-epsilon", cfg.hardness.epsilon,
                  "epsilon in the program-hardness denominator");
}

void apply_hardness_mode(taip::SolverConfig& cfg, const std::string& mode) {
  cfg.hardness.aggregation = mode == "weighted-mean"
                                 ? taip::HardnessAggregation::WeightedMean
                                 : taip::HardnessAggregation::AsWritten;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anytime solver for team allocation to internship programs"};
  app.require_subcommand(1);

  // --- solve ---
  std::string solve_instance, solve_out, solve_trace;
  taip::SolverConfig solver_cfg;
  std::string hardness_mode = "as-written";
  auto* solve_cmd = app.add_subcommand("solve", "run the heuristic solver");
  solve_cmd->add_option("--instance", solve_instance, "instance JSON")->required();
  solve_cmd->add_option("--out", solve_out, "assignment JSON output")->required();
  solve_cmd->add_option("--trace", solve_trace, "trace CSV output");
  add_solver_flags(solve_cmd, solver_cfg, hardness_mode);

  // --- exact ---
  std::string exact_instance, exact_out;
  std::uint64_t exact_cap = 10'000'000;
  auto* exact_cmd = app.add_subcommand("exact", "brute-force exact optimum");
  exact_cmd->add_option("--instance", exact_instance, "instance JSON")->required();
  exact_cmd->add_option("--out", exact_out, "assignment JSON output")->required();
  exact_cmd->add_option("--cap", exact_cap, "enumeration cap");

  // --- count ---
  std::string count_instance;
  auto* count_cmd =
      app.add_subcommand("count", "closed-form feasible-assignment count");
  count_cmd->add_option("--instance", count_instance, "instance JSON")->required();

  // --- export-lp ---
  std::string lp_instance, lp_out, lp_objective = "log1p";
  std::uint64_t lp_cap = 1'000'000;
  auto* lp_cmd = app.add_subcommand("export-lp", "write the LP encoding");
  lp_cmd->add_option("--instance", lp_instance, "instance JSON")->required();
  lp_cmd->add_option("--out", lp_out, "LP file output")->required();
  lp_cmd->add_option("--objective", lp_objective, "log1p | log")
      ->check(CLI::IsMember({"log1p", "log"}));
  lp_cmd->add_option("--cap", lp_cap, "variable cap");

  // --- generate-ontology ---
  taip::GeneratorConfig gen_cfg;
  std::string gen_ont_out;
  auto* gen_ont_cmd =
      app.add_subcommand("generate-ontology", "random competence tree");
  gen_ont_cmd->add_option("--seed", gen_cfg.seed, "random seed");
  gen_ont_cmd->add_option("--branching", gen_cfg.ontology_branching,
                          "max children per node");
  gen_ont_cmd->add_option("--depth", gen_cfg.ontology_depth, "tree depth");
  gen_ont_cmd->add_option("--out", gen_ont_out, "ontology JSON output")->required();

  // --- generate ---
  taip::GeneratorConfig inst_cfg;
  std::string gen_instance_out, gen_ontology_in;
  auto* gen_cmd = app.add_subcommand("generate", "random instance");
  gen_cmd->add_option("--programs", inst_cfg.num_programs, "number of programs");
  gen_cmd->add_option("--seed", inst_cfg.seed, "random seed");
  gen_cmd->add_option("--extra-students", inst_cfg.extra_students,
                      "unmatched students beyond the per-program ones");
  gen_cmd->add_option("--team-size-min", inst_cfg.team_size_range.lo, "");
  gen_cmd->add_option("--team-size-max", inst_cfg.team_size_range.hi, "");
  gen_cmd->add_option("--competencies-min",
                      inst_cfg.competencies_per_program_range.lo, "");
  gen_cmd->add_option("--competencies-max",
                      inst_cfg.competencies_per_program_range.hi, "");
  gen_cmd->add_option("--ontology", gen_ontology_in,
                      "ontology JSON (default: generate one from --seed)");
  gen_cmd->add_option("--ontology-branching", inst_cfg.ontology_branching, "");
  gen_cmd->add_option("--ontology-depth", inst_cfg.ontology_depth, "");
  gen_cmd->add_option("--out", gen_instance_out, "instance JSON output")->required();

  // --- bench ---
  std::string bench_glob, bench_report_dir, bench_seeds = "0";
  taip::BenchmarkOptions bench_opt;
  std::string bench_hardness_mode = "as-written";
  auto* bench_cmd =
      app.add_subcommand("bench", "solver-vs-oracle benchmark over instances");
  bench_cmd->add_option("--instances", bench_glob, "instance files (glob)")
      ->required();
  bench_cmd->add_option("--seeds", bench_seeds, "comma-separated seed list");
  bench_cmd->add_option("--report", bench_report_dir, "report directory")
      ->required();
  bench_cmd->add_option("--cap", bench_opt.oracle_cap, "oracle enumeration cap");
  add_solver_flags(bench_cmd, bench_opt.solver, bench_hardness_mode);

  // --- hardness-curve ---
  std::string curve_out;
  int curve_samples = 1001;
  auto* curve_cmd =
      app.add_subcommand("hardness-curve", "sample the hardness function");
  curve_cmd->add_option("--out", curve_out, "CSV output")->required();
  curve_cmd->add_option("--samples", curve_samples, "sample count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) {
      apply_hardness_mode(solver_cfg, hardness_mode);
      const taip::Instance inst = load_checked(solve_instance);
      taip::SolveResult res = taip::solve(inst, solver_cfg);
      taip::Evaluator ev(inst);
      std::ofstream out(solve_out);
      if (!out) throw std::runtime_error("cannot write '" + solve_out + "'");
      out << taip::assignment_result_json(inst, ev, res.assignment,
                                          res.overall_cp)
                 .dump(2)
          << '\n';
      if (!solve_trace.empty()) {
        std::ofstream tr(solve_trace);
        if (!tr) throw std::runtime_error("cannot write '" + solve_trace + "'");
        taip::write_trace_csv(tr, res.trace, solver_cfg,
                              {"instance: " + solve_instance});
      }
      std::cout << "overall_cp " << res.overall_cp << " after "
                << res.iterations << " iterations\n";
    } else if (*exact_cmd) {
      const taip::Instance inst = load_checked(exact_instance);
      taip::Evaluator ev(inst);
      taip::OptimumResult res = taip::brute_force_optimum(inst, ev, exact_cap);
      std::ofstream out(exact_out);
      if (!out) throw std::runtime_error("cannot write '" + exact_out + "'");
      out << taip::assignment_result_json(inst, ev, res.assignment, res.value)
                 .dump(2)
          << '\n';
      std::cout << "optimum " << res.value << " over " << res.enumerated
                << " assignments\n";
    } else if (*count_cmd) {
      const taip::Instance inst = load_checked(count_instance);
      const taip::CountBreakdown c = taip::count_feasible(inst);
      std::cout << "case: " << taip::to_string(c.case_kind) << '\n';
      std::cout << "buckets (team size x programs):";
      for (const auto& [m, cnt] : c.buckets) std::cout << ' ' << m << 'x' << cnt;
      std::cout << '\n';
      if (c.case_kind == taip::CountCase::ShortageStudents) {
        std::cout << "staffable subsets: " << c.covers.size() << '\n';
        for (const auto& [subset, cnt] : c.covers) {
          std::cout << "  {";
          for (std::size_t i = 0; i < subset.size(); ++i)
            std::cout << (i ? "," : "") << inst.programs[subset[i]].id;
          std::cout << "}: " << cnt.str() << '\n';
        }
      }
      std::cout << "feasible assignments: " << c.total.str() << '\n';
    } else if (*lp_cmd) {
      const taip::Instance inst = load_checked(lp_instance);
      const auto objective = lp_objective == "log"
                                 ? taip::LpObjective::Log
                                 : taip::LpObjective::Log1p;
      const taip::LpSummary s = taip::export_lp(inst, objective, lp_out, lp_cap);
      std::cout << "wrote " << lp_out << ": " << s.variables << " variables, "
                << s.constraints << " constraints\n";
    } else if (*gen_ont_cmd) {
      taip::save_ontology(taip::generate_ontology(gen_cfg), gen_ont_out);
      std::cout << "wrote " << gen_ont_out << '\n';
    } else if (*gen_cmd) {
      const taip::CompetenceOntology ont =
          gen_ontology_in.empty() ? taip::generate_suitable_ontology(inst_cfg)
                                  : taip::load_ontology(gen_ontology_in);
      const taip::Instance inst = taip::generate_instance(ont, inst_cfg);
      auto rep = taip::validate_instance(inst);
      if (!rep.ok())
        throw std::runtime_error("generated instance failed validation: " +
                                 rep.errors.front().message);
      taip::save_instance(inst, gen_instance_out);
      std::cout << "wrote " << gen_instance_out << ": "
                << inst.programs.size() << " programs, "
                << inst.students.size() << " students\n";
    } else if (*bench_cmd) {
      apply_hardness_mode(bench_opt.solver, bench_hardness_mode);
      bench_opt.seeds.clear();
      for (std::size_t at = 0; at < bench_seeds.size();) {
        const auto comma = bench_seeds.find(',', at);
        const auto tok = bench_seeds.substr(
            at, comma == std::string::npos ? std::string::npos : comma - at);
        if (!tok.empty()) bench_opt.seeds.push_back(std::stoull(tok));
        if (comma == std::string::npos) break;
        at = comma + 1;
      }
      if (bench_opt.seeds.empty()) bench_opt.seeds.push_back(0);

      std::vector<std::pair<std::string, taip::Instance>> instances;
      for (const auto& path : expand_glob(bench_glob))
        instances.emplace_back(fs::path(path).filename().string(),
                               load_checked(path));
      if (instances.empty())
        throw std::runtime_error("no instances match '" + bench_glob + "'");

      const taip::BenchmarkReport report =
          taip::run_benchmark(instances, bench_opt);
      fs::create_directories(bench_report_dir);
      {
        std::ofstream out(fs::path(bench_report_dir) / "per_instance.csv");
        taip::write_per_instance_csv(report, out);
      }
      {
        std::ofstream out(fs::path(bench_report_dir) / "summary.csv");
        taip::write_summary_csv(report, out);
      }
      std::cout << "wrote " << bench_report_dir << "/per_instance.csv and "
                << bench_report_dir << "/summary.csv (" << report.runs.size()
                << " runs)\n";
    } else if (*curve_cmd) {
      std::ofstream out(curve_out);
      if (!out) throw std::runtime_error("cannot write '" + curve_out + "'");
      out.precision(12);
      out << "x,hardness\n";
      for (const auto& [x, h] : taip::hardness_curve(curve_samples))
        out << x << ',' << h << '\n';
      std::cout << "wrote " << curve_out << '\n';
    }
  } catch (const CLI::RuntimeError& e) {
    return e.get_exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
