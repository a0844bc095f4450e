#pragma once

// File formats: ontology JSON, instance JSON, assignment-result JSON and the
// solve-trace CSV. JSON object order is preserved on round trips.

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "taip/model.hpp"
#include "taip/proximity.hpp"
#include "taip/solver.hpp"

namespace taip {

using Json = nlohmann::ordered_json;

inline Json ontology_to_json(const CompetenceOntology& o) {
  Json j;
  j["root"] = o.root_id();
  Json edges = Json::array();
  for (const auto& [parent, child] : o.edges())
    edges.push_back(Json::array({parent, child}));
  j["edges"] = std::move(edges);
  return j;
}

inline CompetenceOntology ontology_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("root") || !j.contains("edges"))
    throw std::runtime_error("ontology: expected {\"root\":..., \"edges\":[...]}");
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2)
      throw std::runtime_error("ontology: each edge must be [parent, child]");
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  std::vector<std::string> extra;
  if (j.contains("nodes"))
    for (const auto& n : j.at("nodes")) extra.push_back(n.get<std::string>());
  return CompetenceOntology::from_edges(j.at("root").get<std::string>(), edges,
                                        extra);
}

inline void save_ontology(const CompetenceOntology& o, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << ontology_to_json(o).dump(2) << '\n';
}

inline CompetenceOntology load_ontology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return ontology_from_json(Json::parse(in));
}

inline Json instance_to_json(const Instance& inst) {
  Json j;
  j["ontology"] = ontology_to_json(inst.ontology);
  j["sim_params"] = {{"kappa", inst.sim_params.kappa},
                     {"lambda", inst.sim_params.lambda}};
  Json students = Json::array();
  for (const auto& s : inst.students) {
    Json comps = Json::object();
    for (const auto& k : s.competencies) comps[k.competence] = k.level;
    students.push_back({{"id", s.id}, {"competencies", std::move(comps)}});
  }
  j["students"] = std::move(students);
  Json programs = Json::array();
  for (const auto& p : inst.programs) {
    Json comps = Json::object();
    for (const auto& r : p.competencies)
      comps[r.competence] = {{"level", r.level}, {"weight", r.weight}};
    programs.push_back({{"id", p.id},
                        {"team_size", p.team_size},
                        {"competencies", std::move(comps)}});
  }
  j["programs"] = std::move(programs);
  if (!inst.metadata_json.empty())
    j["metadata"] = Json::parse(inst.metadata_json);
  return j;
}

inline Instance instance_from_json(const Json& j,
                                   const std::filesystem::path& base_dir) {
  Instance inst;
  if (!j.is_object() || !j.contains("ontology") || !j.contains("students") ||
      !j.contains("programs"))
    throw std::runtime_error(
        "instance: expected {\"ontology\":..., \"students\":[...], "
        "\"programs\":[...]}");

  const auto& ont = j.at("ontology");
  if (ont.is_string())
    inst.ontology = load_ontology((base_dir / ont.get<std::string>()).string());
  else
    inst.ontology = ontology_from_json(ont);

  if (j.contains("sim_params")) {
    inst.sim_params.kappa = j.at("sim_params").value("kappa", 1.0);
    inst.sim_params.lambda = j.at("sim_params").value("lambda", 1.0);
  }

  for (const auto& sj : j.at("students")) {
    Student s;
    s.id = sj.at("id").get<std::string>();
    for (const auto& [cid, level] : sj.at("competencies").items())
      s.competencies.push_back({cid, level.get<double>()});
    inst.students.push_back(std::move(s));
  }
  for (const auto& pj : j.at("programs")) {
    Program p;
    p.id = pj.at("id").get<std::string>();
    p.team_size = pj.at("team_size").get<int>();
    for (const auto& [cid, spec] : pj.at("competencies").items())
      p.competencies.push_back({cid, spec.value("level", 1.0),
                                spec.at("weight").get<double>()});
    inst.programs.push_back(std::move(p));
  }
  if (j.contains("metadata")) inst.metadata_json = j.at("metadata").dump();
  return inst;
}

inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << instance_to_json(inst).dump(2) << '\n';
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return instance_from_json(Json::parse(in),
                            std::filesystem::path(path).parent_path());
}

// Assignment with its objective and the per-program best fair assignments.
inline Json assignment_result_json(const Instance& inst, Evaluator& ev,
                                   const TeamAssignment& g, double overall) {
  Json assignment = Json::object();
  Json per_program = Json::object();
  for (std::size_t p = 0; p < g.teams.size(); ++p) {
    if (!g.assigned(static_cast<int>(p))) continue;
    const auto& prog = inst.programs[p];
    Json members = Json::array();
    for (int s : g.teams[p]) members.push_back(inst.students[s].id);
    assignment[prog.id] = std::move(members);

    const auto& best = ev.best(static_cast<int>(p), g.teams[p]);
    Json eta = Json::object();
    for (std::size_t i = 0; i < g.teams[p].size(); ++i) {
      Json comps = Json::array();
      for (int j : best.eta[i]) comps.push_back(prog.competencies[j].competence);
      eta[inst.students[g.teams[p][i]].id] = std::move(comps);
    }
    per_program[prog.id] = {{"cp", best.value}, {"eta", std::move(eta)}};
  }
  return Json{{"assignment", std::move(assignment)},
              {"overall_cp", overall},
              {"per_program", std::move(per_program)}};
}

namespace detail {

inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Trace CSV with a '#' header block echoing the configuration.
inline void write_trace_csv(std::ostream& out, const SolveTrace& trace,
                            const SolverConfig& cfg,
                            const std::vector<std::string>& extra_header = {}) {
  out << "# taip solve trace\n";
  for (const auto& line : extra_header) out << "# " << line << '\n';
  out << "# seed: " << cfg.seed << '\n';
  out << "# convergence_epsilon: " << detail::csv_double(cfg.convergence_epsilon)
      << '\n';
  out << "# patience: " << cfg.patience << '\n';
  out << "# local_search_period: " << cfg.local_search_period << '\n';
  out << "# swap_attempts: " << cfg.swap_attempts << '\n';
  out << "# hausdorff_threshold: " << detail::csv_double(cfg.hausdorff_threshold)
      << '\n';
  out << "# hardness_guard: "
      << (cfg.hardness_guard ? detail::csv_double(*cfg.hardness_guard)
                             : std::string("disabled"))
      << '\n';
  out << "# max_iterations: "
      << (cfg.max_iterations ? std::to_string(*cfg.max_iterations)
                             : std::string("unbounded"))
      << '\n';
  out << "# time_budget_seconds: "
      << (cfg.time_budget_seconds ? detail::csv_double(*cfg.time_budget_seconds)
                                  : std::string("unbounded"))
      << '\n';
  out << "# program_hardness: "
      << (cfg.hardness.aggregation == HardnessAggregation::AsWritten
              ? "as-written"
              : "weighted-mean")
      << '\n';
  out << "# hardness_epsilon: " << detail::csv_double(cfg.hardness.epsilon)
      << '\n';
  out << "elapsed_ms,iteration,event,overall_cp\n";
  for (const auto& row : trace.rows)
    out << detail::csv_double(row.elapsed_ms) << ',' << row.iteration << ','
        << to_string(row.event) << ',' << detail::csv_double(row.overall_cp)
        << '\n';
}

}  // namespace taip
