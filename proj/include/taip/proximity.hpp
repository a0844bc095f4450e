#pragma once

// Fair competence assignments and the competence-proximity calculus.
//
// For a team K and program p, a fair assignment eta distributes p's required
// competencies among the members so that nobody idles and nobody is
// overloaded: union covers C_p, per-student load in [1, ceil(|C_p|/|K|)],
// per-competence coverer count in [1, floor(|K|/|C_p|)+1]. The best fair
// assignment maximizes the Nash product of member proximities.

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "taip/model.hpp"

namespace taip {

struct FairAssignment {
  // student id -> assigned competencies (subset of the program's C_p)
  std::map<std::string, std::vector<CompetenceId>> eta;
};

namespace detail {

// A candidate's factors, multiplied member-major with members in ascending
// student-index order and, within a member, requirement positions ascending.
// Every path that produces a proximity value multiplies in this order, so
// equal assignments produce bit-equal doubles.
inline double nash_product(int team_size,
                           const std::vector<std::uint32_t>& comp_masks,
                           const std::vector<std::vector<double>>& factors) {
  double prod = 1.0;
  for (int i = 0; i < team_size; ++i)
    for (std::size_t j = 0; j < comp_masks.size(); ++j)
      if (comp_masks[j] >> i & 1u) prod *= factors[j][i];
  return prod;
}

// Enumerates every fair assignment as one member-bitmask per requirement,
// masks ascending within a requirement, requirements in program order.
// `yield(masks)` returns false to stop early.
template <typename Yield>
void for_each_fair_masks(int team_size, int num_comps, Yield&& yield) {
  if (team_size < 1 || num_comps < 1) return;
  if (team_size > 20)
    throw std::invalid_argument(
        "fair-assignment enumeration limited to teams of 20");
  const int load_cap = (num_comps + team_size - 1) / team_size;
  const int coverer_cap = team_size / num_comps + 1;
  std::vector<std::uint32_t> masks(num_comps, 0);
  std::vector<int> load(team_size, 0);

  const std::uint32_t full = (team_size >= 32) ? ~0u : ((1u << team_size) - 1);
  bool stop = false;

  auto rec = [&](auto&& self, int j, int zero_load) -> void {
    if (stop) return;
    if (j == num_comps) {
      if (zero_load == 0) stop = !yield(masks);
      return;
    }
    // Members still at load 0 must all be reachable by the remaining
    // requirements.
    if (zero_load > (num_comps - j) * coverer_cap) return;
    for (std::uint32_t m = 1; m <= full && !stop; ++m) {
      if (std::popcount(m) > coverer_cap) continue;
      bool ok = true;
      int newly = 0;
      for (int i = 0; i < team_size; ++i) {
        if (!(m >> i & 1u)) continue;
        if (load[i] + 1 > load_cap) {
          ok = false;
          break;
        }
        if (load[i] == 0) ++newly;
      }
      if (!ok) continue;
      masks[j] = m;
      for (int i = 0; i < team_size; ++i)
        if (m >> i & 1u) ++load[i];
      self(self, j + 1, zero_load - newly);
      for (int i = 0; i < team_size; ++i)
        if (m >> i & 1u) --load[i];
    }
    masks[j] = 0;
  };
  rec(rec, 0, team_size);
}

}  // namespace detail

// Run-scoped evaluator: resolves competence nodes once, precomputes the
// per-(requirement, student) proximity factors and coverage table, and caches
// the best fair assignment per (program, team). Caching is invisible: cached
// results equal fresh computation bit for bit.
class Evaluator {
 public:
  struct BestTeam {
    double value = 0.0;
    // per team position (team sorted ascending), sorted requirement positions
    std::vector<std::vector<int>> eta;
  };

  explicit Evaluator(const Instance& inst) : inst_(inst) {
    const int n_students = static_cast<int>(inst.students.size());
    const int n_programs = static_cast<int>(inst.programs.size());

    student_nodes_.resize(n_students);
    for (int s = 0; s < n_students; ++s)
      for (const auto& k : inst.students[s].competencies)
        student_nodes_[s].push_back(inst.ontology.index_of(k.competence));

    program_nodes_.resize(n_programs);
    program_weights_.resize(n_programs);
    for (int p = 0; p < n_programs; ++p)
      for (const auto& r : inst.programs[p].competencies) {
        program_nodes_[p].push_back(inst.ontology.index_of(r.competence));
        program_weights_[p].push_back(r.weight);
      }

    // Coverage of every required node by every student.
    std::map<int, int> slot_of;
    for (const auto& nodes : program_nodes_)
      for (int node : nodes)
        if (slot_of.emplace(node, static_cast<int>(universe_.size())).second)
          universe_.push_back(node);
    slot_of_ = std::move(slot_of);
    cvg_.assign(n_students, std::vector<double>(universe_.size(), 0.0));
    for (int s = 0; s < n_students; ++s)
      for (std::size_t u = 0; u < universe_.size(); ++u)
        cvg_[s][u] = inst.ontology.coverage(universe_[u], student_nodes_[s],
                                            inst.sim_params);

    factors_.resize(n_programs);
    for (int p = 0; p < n_programs; ++p) {
      const auto& nodes = program_nodes_[p];
      factors_[p].assign(nodes.size(), std::vector<double>(n_students, 0.0));
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double floor = 1.0 - program_weights_[p][j];
        const int slot = slot_of_.at(nodes[j]);
        for (int s = 0; s < n_students; ++s)
          factors_[p][j][s] = std::max(floor, cvg_[s][slot]);
      }
    }
  }

  const Instance& instance() const { return inst_; }

  // cvg(c, C_s) for a required node; falls back to a direct computation for
  // nodes outside the required universe.
  double coverage(int student, int node) const {
    auto it = slot_of_.find(node);
    if (it != slot_of_.end()) return cvg_[student][it->second];
    return inst_.ontology.coverage(node, student_nodes_[student],
                                   inst_.sim_params);
  }

  const std::vector<int>& program_nodes(int p) const { return program_nodes_[p]; }
  const std::vector<int>& student_nodes(int s) const { return student_nodes_[s]; }

  // max(1 - w_p(c_j), cvg(c_j, C_s)) for requirement j of program p.
  double factor(int p, int j, int student) const { return factors_[p][j][student]; }

  // Best fair assignment for (program, team); `team` must be sorted.
  const BestTeam& best(int p, const std::vector<int>& team) {
    auto key = std::make_pair(p, team);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(std::move(key), compute_best(p, team)).first->second;
  }

  double best_value(int p, const std::vector<int>& team) {
    return best(p, team).value;
  }

  // Hausdorff-style set similarity between two programs' required
  // competencies (coverage-valued: higher means more alike).
  double program_set_similarity(int p1, int p2) {
    if (hausdorff_.empty())
      hausdorff_.assign(inst_.programs.size(),
                        std::vector<double>(inst_.programs.size(), -1.0));
    double& memo = hausdorff_[p1][p2];
    if (memo < 0.0) {
      const auto& a = program_nodes_[p1];
      const auto& b = program_nodes_[p2];
      auto min_cvg = [this](const std::vector<int>& from,
                            const std::vector<int>& to) {
        double worst = 1.0;
        for (int c : from)
          worst = std::min(worst,
                           inst_.ontology.coverage(c, to, inst_.sim_params));
        return worst;
      };
      memo = std::max(min_cvg(a, b), min_cvg(b, a));
      hausdorff_[p2][p1] = memo;
    }
    return memo;
  }

 private:
  BestTeam compute_best(int p, const std::vector<int>& team) const {
    const int k = static_cast<int>(team.size());
    const int n = static_cast<int>(program_nodes_[p].size());
    if (k < 1)
      throw std::invalid_argument("best fair assignment: empty team");
    if (k > 20)
      throw std::invalid_argument(
          "fair-assignment enumeration limited to teams of 20");

    std::vector<std::vector<double>> f(n, std::vector<double>(k, 0.0));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < k; ++i) f[j][i] = factors_[p][j][team[i]];

    BestTeam best;
    bool found = false;
    // Branch pruning: factors never exceed 1, so a running product already
    // at or below the incumbent (with a small fp margin) cannot win.
    std::vector<std::uint32_t> masks(n, 0);
    std::vector<int> load(k, 0);
    const int load_cap = (n + k - 1) / k;
    const int coverer_cap = k / n + 1;
    const std::uint32_t full = (k >= 32) ? ~0u : ((1u << k) - 1);

    auto rec = [&](auto&& self, int j, int zero_load, double running) -> void {
      if (found && running <= best.value * (1.0 - 1e-12)) return;
      if (j == n) {
        if (zero_load != 0) return;
        const double value = detail::nash_product(k, masks, f);
        if (!found || value > best.value) {
          found = true;
          best.value = value;
          best.eta.assign(k, {});
          for (int jj = 0; jj < n; ++jj)
            for (int i = 0; i < k; ++i)
              if (masks[jj] >> i & 1u) best.eta[i].push_back(jj);
        }
        return;
      }
      if (zero_load > (n - j) * coverer_cap) return;
      for (std::uint32_t m = 1; m <= full; ++m) {
        if (std::popcount(m) > coverer_cap) continue;
        bool ok = true;
        int newly = 0;
        double next = running;
        for (int i = 0; i < k; ++i) {
          if (!(m >> i & 1u)) continue;
          if (load[i] + 1 > load_cap) {
            ok = false;
            break;
          }
          if (load[i] == 0) ++newly;
          next *= f[j][i];
        }
        if (!ok) continue;
        masks[j] = m;
        for (int i = 0; i < k; ++i)
          if (m >> i & 1u) ++load[i];
        self(self, j + 1, zero_load - newly, next);
        for (int i = 0; i < k; ++i)
          if (m >> i & 1u) --load[i];
      }
      masks[j] = 0;
    };
    rec(rec, 0, k, 1.0);

    if (!found)
      throw std::runtime_error(
          "no fair competence assignment exists for team size " +
          std::to_string(k) + " and " + std::to_string(n) +
          " required competencies");
    return best;
  }

  const Instance& inst_;
  std::vector<std::vector<int>> student_nodes_;
  std::vector<std::vector<int>> program_nodes_;
  std::vector<std::vector<double>> program_weights_;
  std::vector<int> universe_;
  std::map<int, int> slot_of_;
  std::vector<std::vector<double>> cvg_;   // [student][universe slot]
  std::vector<std::vector<std::vector<double>>> factors_;  // [p][j][student]
  std::map<std::pair<int, std::vector<int>>, BestTeam> cache_;
  std::vector<std::vector<double>> hausdorff_;
};

namespace detail {

inline std::vector<int> sorted_team_indices(const Instance& inst,
                                            const std::vector<std::string>& ids) {
  std::vector<int> team;
  team.reserve(ids.size());
  for (const auto& id : ids) {
    auto ix = inst.find_student(id);
    if (!ix) throw std::out_of_range("unknown student id '" + id + "'");
    team.push_back(*ix);
  }
  std::sort(team.begin(), team.end());
  return team;
}

inline FairAssignment masks_to_assignment(const Instance& inst,
                                          const Program& prog,
                                          const std::vector<int>& team,
                                          const std::vector<std::uint32_t>& masks) {
  FairAssignment fa;
  for (std::size_t i = 0; i < team.size(); ++i) {
    auto& comps = fa.eta[inst.students[team[i]].id];
    for (std::size_t j = 0; j < masks.size(); ++j)
      if (masks[j] >> i & 1u) comps.push_back(prog.competencies[j].competence);
  }
  return fa;
}

}  // namespace detail

// All fair assignments for (program, team), in deterministic enumeration
// order. Empty result flags an infeasible (|K|, |C_p|) pair.
inline std::vector<FairAssignment> enumerate_fair_assignments(
    const Instance& inst, const Program& prog,
    const std::vector<std::string>& team_ids) {
  const auto team = detail::sorted_team_indices(inst, team_ids);
  std::vector<FairAssignment> out;
  detail::for_each_fair_masks(
      static_cast<int>(team.size()),
      static_cast<int>(prog.competencies.size()),
      [&](const std::vector<std::uint32_t>& masks) {
        out.push_back(detail::masks_to_assignment(inst, prog, team, masks));
        return true;
      });
  return out;
}

// Proximity of one student for the competencies assigned to them.
inline double student_cp(const Instance& inst, const Program& prog,
                         const Student& student, const FairAssignment& fa) {
  auto it = fa.eta.find(student.id);
  if (it == fa.eta.end())
    throw std::domain_error("student '" + student.id +
                            "' is not in the fair assignment's domain");
  // Factors in requirement-position order, so equal assignments multiply in
  // the same order regardless of how the caller listed competencies.
  std::vector<int> positions;
  for (const auto& c : it->second) {
    bool known = false;
    for (std::size_t j = 0; j < prog.competencies.size(); ++j)
      if (prog.competencies[j].competence == c) {
        positions.push_back(static_cast<int>(j));
        known = true;
        break;
      }
    if (!known)
      throw std::out_of_range("assigned competence '" + c +
                              "' is not required by program '" + prog.id + "'");
  }
  std::sort(positions.begin(), positions.end());

  std::vector<int> skills;
  for (const auto& k : student.competencies)
    skills.push_back(inst.ontology.index_of(k.competence));

  double prod = 1.0;
  for (int j : positions) {
    const auto& req = prog.competencies[j];
    const double cvg = inst.ontology.coverage(
        inst.ontology.index_of(req.competence), skills, inst.sim_params);
    prod *= std::max(1.0 - req.weight, cvg);
  }
  return prod;
}

// Nash product of member proximities; invariant under team member order.
inline double team_cp(const Instance& inst, const Program& prog,
                      const std::vector<std::string>& team_ids,
                      const FairAssignment& fa) {
  const auto team = detail::sorted_team_indices(inst, team_ids);
  double prod = 1.0;
  for (int s : team) prod *= student_cp(inst, prog, inst.students[s], fa);
  return prod;
}

// The fair assignment maximizing team_cp, with its value. First maximal in
// enumeration order wins ties.
inline std::pair<FairAssignment, double> best_fair_assignment(
    const Instance& inst, const Program& prog,
    const std::vector<std::string>& team_ids) {
  auto pix = inst.find_program(prog.id);
  if (!pix)
    throw std::out_of_range("unknown program id '" + prog.id + "'");
  Evaluator ev(inst);
  const auto team = detail::sorted_team_indices(inst, team_ids);
  const auto& best = ev.best(*pix, team);

  std::vector<std::uint32_t> masks(prog.competencies.size(), 0);
  for (std::size_t i = 0; i < best.eta.size(); ++i)
    for (int j : best.eta[i]) masks[j] |= 1u << i;
  return {detail::masks_to_assignment(inst, prog, team, masks), best.value};
}

}  // namespace taip
