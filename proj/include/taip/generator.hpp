#pragma once

// Synthetic ontology and instance generation. Programs draw a team size in
// {1..3} and 2..5 required competencies with truncated-normal weights; each
// program then gets tailor-made students whose skills are the required
// competence or one of its children. Everything is seeded and reproducible.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "taip/model.hpp"
#include "taip/rng.hpp"

namespace taip {

struct IntRange {
  int lo = 0;
  int hi = 0;
};

struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct GeneratorConfig {
  std::uint64_t seed = 0;
  int num_programs = 10;
  IntRange team_size_range{1, 3};
  IntRange competencies_per_program_range{2, 5};
  RealRange weight_mu_range{0.0, 1.0};
  RealRange weight_sigma_range{0.01, 0.1};
  int extra_students = 0;
  int ontology_branching = 3;
  int ontology_depth = 4;
};

// Seeded rooted tree: every node above the bottom level gets 1..branching
// children (uniform). Node ids are "c0" (root), "c1", ... in creation order.
inline CompetenceOntology generate_ontology(const GeneratorConfig& cfg) {
  if (cfg.ontology_branching < 1 || cfg.ontology_depth < 1)
    throw std::invalid_argument("generate_ontology: branching and depth must be >= 1");
  Rng rng(cfg.seed);
  std::vector<std::pair<std::string, std::string>> edges;
  int counter = 0;
  std::vector<std::string> level{ "c0" };
  ++counter;
  for (int d = 0; d < cfg.ontology_depth; ++d) {
    std::vector<std::string> next;
    for (const auto& parent : level) {
      const int kids = static_cast<int>(uniform_int(rng, 1, cfg.ontology_branching));
      for (int k = 0; k < kids; ++k) {
        std::string id = "c" + std::to_string(counter++);
        edges.emplace_back(parent, id);
        next.push_back(std::move(id));
      }
    }
    level = std::move(next);
  }
  return CompetenceOntology::from_edges("c0", edges);
}

// Same, but guaranteed to supply enough distinct competencies for the
// instance config: small draws are retried with derived seeds.
inline CompetenceOntology generate_suitable_ontology(const GeneratorConfig& cfg) {
  GeneratorConfig attempt = cfg;
  for (std::uint64_t i = 0;; ++i) {
    attempt.seed = cfg.seed + 0x9e3779b97f4a7c15ULL * i;
    CompetenceOntology o = generate_ontology(attempt);
    if (o.node_count() - 1 >= cfg.competencies_per_program_range.hi) return o;
  }
}

namespace detail {

inline double truncated_normal(Rng& rng, double mu, double sigma) {
  for (;;) {
    const double v = normal(rng, mu, sigma);
    if (v > 0.0 && v <= 1.0) return v;
  }
}

}  // namespace detail

// Synthetic instance over an existing ontology. The root is excluded from
// program requirements (it can never be covered better than 0 through a
// child, and nothing specializes it meaningfully).
inline Instance generate_instance(const CompetenceOntology& ontology,
                                  const GeneratorConfig& cfg) {
  if (cfg.num_programs < 1 || cfg.extra_students < 0 ||
      cfg.team_size_range.lo < 1 || cfg.team_size_range.hi < cfg.team_size_range.lo ||
      cfg.competencies_per_program_range.lo < 1 ||
      cfg.competencies_per_program_range.hi < cfg.competencies_per_program_range.lo)
    throw std::invalid_argument("generate_instance: empty or invalid range in config");
  const int selectable = ontology.node_count() - 1;  // root excluded
  if (selectable < cfg.competencies_per_program_range.hi)
    throw std::runtime_error(
        "generate_instance: ontology has " + std::to_string(selectable) +
        " selectable competencies; needs at least " +
        std::to_string(cfg.competencies_per_program_range.hi));

  Rng rng(cfg.seed);
  Instance inst;
  inst.ontology = ontology;
  inst.sim_params = SimilarityParams{};

  auto make_student_for = [&](const Program& prog, int number) {
    Student s;
    s.id = "s" + std::to_string(number);
    std::vector<char> have(ontology.node_count(), 0);
    for (const auto& r : prog.competencies) {
      const int node = ontology.index_of(r.competence);
      const auto kids = ontology.children(node);
      // the required competence itself or one of its children, uniformly
      const int pick_ix = static_cast<int>(
          uniform_int(rng, 0, static_cast<std::int64_t>(kids.size())));
      const int pick = pick_ix == 0 ? node : kids[pick_ix - 1];
      if (!have[pick]) {
        have[pick] = 1;
        s.competencies.push_back({ontology.id_of(pick), 1.0});
      }
    }
    return s;
  };

  int student_counter = 0;
  for (int i = 0; i < cfg.num_programs; ++i) {
    Program p;
    p.id = "p" + std::to_string(i);
    p.team_size = static_cast<int>(
        uniform_int(rng, cfg.team_size_range.lo, cfg.team_size_range.hi));
    const int n_comps =
        static_cast<int>(uniform_int(rng, cfg.competencies_per_program_range.lo,
                                     cfg.competencies_per_program_range.hi));
    // uniform draw without replacement, root excluded
    std::vector<int> candidates(selectable);
    for (int c = 0; c < selectable; ++c) candidates[c] = c + 1;
    const double mu = uniform_real(rng, cfg.weight_mu_range.lo, cfg.weight_mu_range.hi);
    const double sigma =
        uniform_real(rng, cfg.weight_sigma_range.lo, cfg.weight_sigma_range.hi);
    for (int j = 0; j < n_comps; ++j) {
      const int at = static_cast<int>(
          uniform_int(rng, 0, static_cast<std::int64_t>(candidates.size()) - 1));
      const int node = candidates[at];
      candidates.erase(candidates.begin() + at);
      p.competencies.push_back(
          {ontology.id_of(node), 1.0, detail::truncated_normal(rng, mu, sigma)});
    }
    inst.programs.push_back(std::move(p));
  }
  for (const auto& p : inst.programs)
    for (int k = 0; k < p.team_size; ++k)
      inst.students.push_back(make_student_for(p, student_counter++));
  for (int e = 0; e < cfg.extra_students; ++e) {
    const int p = static_cast<int>(
        uniform_int(rng, 0, static_cast<std::int64_t>(inst.programs.size()) - 1));
    inst.students.push_back(make_student_for(inst.programs[p], student_counter++));
  }

  inst.metadata_json =
      std::string("{\"generator\":{\"seed\":") + std::to_string(cfg.seed) +
      ",\"num_programs\":" + std::to_string(cfg.num_programs) +
      ",\"extra_students\":" + std::to_string(cfg.extra_students) +
      ",\"endowment\":\"one-match-per-required-competence\"}}";
  return inst;
}

}  // namespace taip
