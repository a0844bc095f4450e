#pragma once

// Problem data model: programs, students, instances and team assignments.

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taip/ontology.hpp"

namespace taip {

struct ProgramRequirement {
  CompetenceId competence;
  double level = 1.0;   // stored and round-tripped; no formula consumes it
  double weight = 1.0;  // importance, in (0,1]
};

struct Program {
  std::string id;
  std::vector<ProgramRequirement> competencies;  // input order is canonical
  int team_size = 1;

  const ProgramRequirement* find(const CompetenceId& c) const {
    for (const auto& r : competencies)
      if (r.competence == c) return &r;
    return nullptr;
  }
};

struct StudentSkill {
  CompetenceId competence;
  double level = 1.0;
};

struct Student {
  std::string id;
  std::vector<StudentSkill> competencies;

  std::vector<CompetenceId> competence_ids() const {
    std::vector<CompetenceId> out;
    out.reserve(competencies.size());
    for (const auto& s : competencies) out.push_back(s.competence);
    return out;
  }
};

struct Instance {
  CompetenceOntology ontology;
  SimilarityParams sim_params;
  std::vector<Student> students;
  std::vector<Program> programs;
  std::string metadata_json;  // free-form provenance block, round-tripped verbatim

  std::optional<int> find_student(const std::string& id) const {
    for (std::size_t i = 0; i < students.size(); ++i)
      if (students[i].id == id) return static_cast<int>(i);
    return std::nullopt;
  }
  std::optional<int> find_program(const std::string& id) const {
    for (std::size_t i = 0; i < programs.size(); ++i)
      if (programs[i].id == id) return static_cast<int>(i);
    return std::nullopt;
  }
  int total_required() const {
    int sum = 0;
    for (const auto& p : programs) sum += p.team_size;
    return sum;
  }
};

// Teams keyed by program index; an empty team means the program is
// unassigned. Member indices are kept sorted.
struct TeamAssignment {
  std::vector<std::vector<int>> teams;

  explicit TeamAssignment(std::size_t num_programs = 0) : teams(num_programs) {}

  bool assigned(int p) const { return !teams[p].empty(); }
  int assigned_count() const {
    int n = 0;
    for (const auto& t : teams) n += t.empty() ? 0 : 1;
    return n;
  }
  std::vector<int> unassigned_students(const Instance& inst) const {
    std::vector<char> used(inst.students.size(), 0);
    for (const auto& t : teams)
      for (int s : t) used[s] = 1;
    std::vector<int> out;
    for (std::size_t s = 0; s < used.size(); ++s)
      if (!used[s]) out.push_back(static_cast<int>(s));
    return out;
  }
};

struct Violation {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> errors;
  std::vector<Violation> warnings;
  bool ok() const { return errors.empty(); }
};

// Structural checks on a loaded instance. Violations are the payload, not
// exceptions, so callers can report them all at once.
inline ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  auto err = [&rep](std::string code, std::string msg) {
    rep.errors.push_back({std::move(code), std::move(msg)});
  };

  if (!inst.sim_params.valid())
    err("sim-params-out-of-range",
        "kappa and lambda must lie in [1,2]");

  std::set<std::string> seen;
  for (const auto& p : inst.programs) {
    if (!seen.insert("p:" + p.id).second)
      err("duplicate-id", "duplicate program id '" + p.id + "'");
    if (p.competencies.empty())
      err("empty-competencies", "program '" + p.id + "' requires no competencies");
    if (p.team_size < 1)
      err("bad-team-size", "program '" + p.id + "' has team_size " +
                               std::to_string(p.team_size) + "; must be >= 1");
    std::set<std::string> comps;
    for (const auto& r : p.competencies) {
      if (!comps.insert(r.competence).second)
        err("duplicate-id", "program '" + p.id + "' lists competence '" +
                                r.competence + "' twice");
      if (!inst.ontology.contains(r.competence))
        err("unknown-competence", "program '" + p.id +
                                      "' references unknown competence '" +
                                      r.competence + "'");
      if (!(r.weight > 0.0 && r.weight <= 1.0))
        err("weight-out-of-range", "program '" + p.id + "' weight for '" +
                                       r.competence + "' is " +
                                       std::to_string(r.weight) +
                                       "; must lie in (0,1]");
      if (r.level < 0.0)
        err("negative-level", "program '" + p.id + "' level for '" +
                                  r.competence + "' is negative");
    }
  }
  for (const auto& s : inst.students) {
    if (!seen.insert("s:" + s.id).second)
      err("duplicate-id", "duplicate student id '" + s.id + "'");
    if (s.competencies.empty())
      err("empty-competencies", "student '" + s.id + "' has no competencies");
    std::set<std::string> comps;
    for (const auto& k : s.competencies) {
      if (!comps.insert(k.competence).second)
        err("duplicate-id", "student '" + s.id + "' lists competence '" +
                                k.competence + "' twice");
      if (!inst.ontology.contains(k.competence))
        err("unknown-competence", "student '" + s.id +
                                      "' references unknown competence '" +
                                      k.competence + "'");
      if (k.level < 0.0)
        err("negative-level", "student '" + s.id + "' level for '" +
                                  k.competence + "' is negative");
    }
  }
  return rep;
}

// Coverage of program p by student s: product over p's required competencies
// of the student's best similarity for each.
inline double student_program_coverage(const Instance& inst, const Student& s,
                                       const Program& p) {
  std::vector<int> skills;
  skills.reserve(s.competencies.size());
  for (const auto& k : s.competencies)
    skills.push_back(inst.ontology.index_of(k.competence));
  double prod = 1.0;
  for (const auto& r : p.competencies)
    prod *= inst.ontology.coverage(inst.ontology.index_of(r.competence), skills,
                                   inst.sim_params);
  return prod;
}

// Disjointness and size compliance. Unassigned programs are warnings: a
// partial assignment is legal, just not a complete one.
inline ValidationReport validate_assignment(const Instance& inst,
                                            const TeamAssignment& g) {
  ValidationReport rep;
  if (g.teams.size() != inst.programs.size()) {
    rep.errors.push_back({"shape-mismatch",
                          "assignment covers " + std::to_string(g.teams.size()) +
                              " programs; instance has " +
                              std::to_string(inst.programs.size())});
    return rep;
  }
  std::vector<int> owner(inst.students.size(), -1);
  for (std::size_t p = 0; p < g.teams.size(); ++p) {
    const auto& team = g.teams[p];
    if (team.empty()) {
      rep.warnings.push_back({"unassigned-program",
                              "program '" + inst.programs[p].id +
                                  "' has no team"});
      continue;
    }
    if (static_cast<int>(team.size()) != inst.programs[p].team_size)
      rep.errors.push_back(
          {"team-size-mismatch",
           "program '" + inst.programs[p].id + "' has a team of " +
               std::to_string(team.size()) + "; requires " +
               std::to_string(inst.programs[p].team_size)});
    for (int s : team) {
      if (s < 0 || s >= static_cast<int>(inst.students.size())) {
        rep.errors.push_back({"unknown-student",
                              "student index " + std::to_string(s) +
                                  " out of range"});
        continue;
      }
      if (owner[s] >= 0)
        rep.errors.push_back(
            {"disjointness",
             "student '" + inst.students[s].id + "' appears in teams for '" +
                 inst.programs[owner[s]].id + "' and '" + inst.programs[p].id +
                 "'"});
      else
        owner[s] = static_cast<int>(p);
    }
  }
  return rep;
}

}  // namespace taip
