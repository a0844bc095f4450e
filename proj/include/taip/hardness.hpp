#pragma once

// Fuzzy-entropy difficulty scores for competencies and programs. These only
// ever order the greedy allocation, so the log base (natural here) is
// behaviorally neutral.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "taip/model.hpp"

namespace taip {

// Two aggregations are exposed because they order programs oppositely:
// the inverse form scores easily-covered competencies as maximally hard.
enum class HardnessAggregation {
  AsWritten,     // W * sum_c w(c) / (h(c,S) + eps)
  WeightedMean,  // W * sum_c h(c,S) * w(c)
};

struct HardnessConfig {
  double epsilon = 1e-6;
  HardnessAggregation aggregation = HardnessAggregation::AsWritten;
};

// Piecewise fuzzy-entropy term: H(x) + H(1-x) above coverage 0.5, reflected
// below it so that zero coverage scores as hard as it feels. H(x) = x ln x,
// with 0 ln 0 = 0.
inline double entropy_term(double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("entropy_term: argument outside [0,1]");
  auto H = [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; };
  const double fuzzy = H(x) + H(1.0 - x);
  if (x >= 0.5) return fuzzy;
  return 4.0 * H(0.5) - fuzzy;
}

// h(c,S) = -(1/|S|) * sum_s entropy_term(cvg(c, C_s)); lies in [0, 2 ln 2].
inline double competence_hardness(const Instance& inst, const CompetenceId& c,
                                  std::span<const int> students) {
  if (students.empty())
    throw std::domain_error("competence_hardness: empty student set");
  const int node = inst.ontology.index_of(c);
  double sum = 0.0;
  for (int s : students) {
    std::vector<int> skills;
    skills.reserve(inst.students[s].competencies.size());
    for (const auto& k : inst.students[s].competencies)
      skills.push_back(inst.ontology.index_of(k.competence));
    sum += entropy_term(inst.ontology.coverage(node, skills, inst.sim_params));
  }
  return -sum / static_cast<double>(students.size());
}

// Same, with coverages already in hand (the solver keeps a table).
inline double competence_hardness_from_coverages(std::span<const double> cvgs) {
  if (cvgs.empty())
    throw std::domain_error("competence_hardness: empty student set");
  double sum = 0.0;
  for (double v : cvgs) sum += entropy_term(v);
  return -sum / static_cast<double>(cvgs.size());
}

// Program hardness: importance-weighted aggregation of its competencies'
// hardness, normalized by total weight.
inline double program_hardness(const Instance& inst, const Program& prog,
                               std::span<const int> students,
                               const HardnessConfig& cfg) {
  if (students.empty())
    throw std::domain_error("program_hardness: empty student set");
  double weight_sum = 0.0;
  double acc = 0.0;
  for (const auto& r : prog.competencies) {
    const double h = competence_hardness(inst, r.competence, students);
    weight_sum += r.weight;
    if (cfg.aggregation == HardnessAggregation::AsWritten)
      acc += r.weight / (h + cfg.epsilon);
    else
      acc += r.weight * h;
  }
  return acc / weight_sum;
}

}  // namespace taip
