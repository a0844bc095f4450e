#pragma once

// Benchmark orchestration: solve a batch of instances against the exact
// oracle (or best-known when the search space is too big) and aggregate
// quality-vs-time curves.

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "taip/hardness.hpp"
#include "taip/oracle.hpp"
#include "taip/solver.hpp"

namespace taip {

struct BenchmarkOptions {
  SolverConfig solver;
  std::uint64_t oracle_cap = 10'000'000;
  std::vector<std::uint64_t> seeds{0};
};

struct BenchmarkRun {
  std::string instance_name;
  std::uint64_t seed = 0;
  bool oracle_exact = true;  // false: ratios are against best-known
  double reference = 0.0;    // oracle optimum, or best final across seeds
  double initial_cp = 0.0;
  double final_cp = 0.0;
  std::uint64_t iterations = 0;
  double total_ms = 0.0;
  SolveTrace trace;
};

struct BenchmarkReport {
  std::vector<BenchmarkRun> runs;

  static double ratio(double value, double reference) {
    if (reference > 0.0) return value / reference;
    return value == 0.0 ? 1.0 : 0.0;
  }
};

// Runs the solver for every (instance, seed) pair. Instances above the
// oracle cap fall back to best-known references and are flagged.
inline BenchmarkReport run_benchmark(
    const std::vector<std::pair<std::string, Instance>>& instances,
    const BenchmarkOptions& opt) {
  BenchmarkReport report;
  for (const auto& [name, inst] : instances) {
    Evaluator ev(inst);
    bool exact = false;
    double reference = 0.0;
    if (count_feasible(inst).total <= opt.oracle_cap) {
      reference = brute_force_optimum(inst, ev, opt.oracle_cap).value;
      exact = true;
    }

    std::vector<std::size_t> fresh;
    for (std::uint64_t seed : opt.seeds) {
      SolverConfig cfg = opt.solver;
      cfg.seed = seed;
      SolveResult res = solve(inst, cfg);
      BenchmarkRun run;
      run.instance_name = name;
      run.seed = seed;
      run.oracle_exact = exact;
      run.reference = reference;
      run.initial_cp = res.trace.rows.front().overall_cp;
      run.final_cp = res.overall_cp;
      run.iterations = res.iterations;
      run.total_ms = res.trace.rows.back().elapsed_ms;
      run.trace = std::move(res.trace);
      fresh.push_back(report.runs.size());
      report.runs.push_back(std::move(run));
    }
    if (!exact) {
      double best_known = 0.0;
      for (std::size_t i : fresh)
        best_known = std::max(best_known, report.runs[i].final_cp);
      for (std::size_t i : fresh) report.runs[i].reference = best_known;
    }
  }
  return report;
}

// One row per trace event of every run.
inline void write_per_instance_csv(const BenchmarkReport& report,
                                   std::ostream& out) {
  out.precision(12);
  out << "instance,seed,elapsed_ms,iteration,event,overall_cp,quality_ratio\n";
  for (const auto& run : report.runs)
    for (const auto& row : run.trace.rows)
      out << run.instance_name << ',' << run.seed << ',' << row.elapsed_ms
          << ',' << row.iteration << ',' << to_string(row.event) << ','
          << row.overall_cp << ','
          << BenchmarkReport::ratio(row.overall_cp, run.reference) << '\n';
}

// Aggregate mean/min/max quality over absolute time, sampled in `bins`
// steps, with per-run final statistics in a comment header.
inline void write_summary_csv(const BenchmarkReport& report, std::ostream& out,
                              int bins = 50) {
  out.precision(12);
  double t_max = 0.0;
  double mean_final = 0.0, mean_initial = 0.0;
  int optimal = 0, flagged = 0;
  for (const auto& run : report.runs) {
    t_max = std::max(t_max, run.total_ms);
    const double fr = BenchmarkReport::ratio(run.final_cp, run.reference);
    mean_final += fr;
    mean_initial += BenchmarkReport::ratio(run.initial_cp, run.reference);
    if (fr >= 1.0 - 1e-9) ++optimal;
    if (!run.oracle_exact) ++flagged;
  }
  const double n = report.runs.empty() ? 1.0 : double(report.runs.size());
  out << "# runs: " << report.runs.size() << '\n';
  out << "# mean_initial_quality_ratio: " << mean_initial / n << '\n';
  out << "# mean_final_quality_ratio: " << mean_final / n << '\n';
  out << "# runs_reaching_reference: " << optimal << '\n';
  out << "# best_known_mode_runs: " << flagged << '\n';
  out << "time_ms,mean_quality_ratio,min_quality_ratio,max_quality_ratio,runs\n";
  if (report.runs.empty()) return;
  for (int b = 0; b <= bins; ++b) {
    const double t = t_max * b / bins;
    double sum = 0.0, lo = 2.0, hi = -1.0;
    for (const auto& run : report.runs) {
      double value = 0.0;
      for (const auto& row : run.trace.rows) {
        if (row.elapsed_ms <= t) value = row.overall_cp;
        else break;
      }
      const double r = BenchmarkReport::ratio(value, run.reference);
      sum += r;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    out << t << ',' << sum / n << ',' << lo << ',' << hi << ','
        << report.runs.size() << '\n';
  }
}

// Samples of the competence-hardness curve: the hardness a competence would
// score if every student covered it at exactly x.
inline std::vector<std::pair<double, double>> hardness_curve(int samples = 1001) {
  std::vector<std::pair<double, double>> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double x = samples == 1 ? 0.0 : double(i) / (samples - 1);
    out.emplace_back(x, -entropy_term(x));
  }
  return out;
}

}  // namespace taip
