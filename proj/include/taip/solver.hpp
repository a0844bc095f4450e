#pragma once

// The TAIP heuristic: hardness-ordered greedy initial allocation, then an
// anytime improvement loop of pairwise crossovers, availability swaps and
// periodic local-search sweeps. Single-threaded and deterministic for a
// given (instance, config, seed).

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "taip/hardness.hpp"
#include "taip/model.hpp"
#include "taip/proximity.hpp"
#include "taip/rng.hpp"

namespace taip {

enum class TraceEvent { Initial, Crossover, Swap, LocalSearch };

inline const char* to_string(TraceEvent e) {
  switch (e) {
    case TraceEvent::Initial: return "initial";
    case TraceEvent::Crossover: return "crossover";
    case TraceEvent::Swap: return "swap";
    case TraceEvent::LocalSearch: return "local-search";
  }
  return "?";
}

struct TraceRow {
  double elapsed_ms = 0.0;
  std::uint64_t iteration = 0;
  TraceEvent event = TraceEvent::Initial;
  double overall_cp = 0.0;
};

struct SolveTrace {
  std::vector<TraceRow> rows;
};

struct SolverConfig {
  std::uint64_t seed = 0;
  double convergence_epsilon = 1e-6;  // stop once 1 - current_cp <= epsilon
  int patience = 1000;                // iterations without improvement
  int local_search_period = 50;
  int swap_attempts = 10;
  double hausdorff_threshold = 0.5;
  // Skip programs whose hardness reaches this bound during the initial
  // allocation. Off by default: on the as-written scale easily-staffed
  // programs score near 1/epsilon, so a small bound skips nearly everything
  // and the improvement stage would start without a foothold.
  std::optional<double> hardness_guard;
  std::optional<std::uint64_t> max_iterations;
  std::optional<double> time_budget_seconds;
  HardnessConfig hardness;
};

struct SolveResult {
  TeamAssignment assignment;
  SolveTrace trace;
  double overall_cp = 0.0;  // final assignment, evaluated from scratch
  std::uint64_t iterations = 0;
};

// Candidate teams for a pair of programs, from a crossover or swap search.
struct PairMove {
  double value = 0.0;  // best(p1)*best(p2) for the candidate teams
  std::vector<int> team1;
  std::vector<int> team2;
  std::size_t candidates_examined = 0;
};

namespace detail {

// Product over assigned programs in input order. Unassigned programs zero
// the product when the student pool could cover everything; with a genuine
// student shortage they are skipped (a zero factor for unavoidable vacancies
// would flatten the search landscape).
inline double overall_product(const Instance& inst, Evaluator& ev,
                              const TeamAssignment& g) {
  const bool enough =
      inst.total_required() <= static_cast<int>(inst.students.size());
  double prod = 1.0;
  for (std::size_t p = 0; p < g.teams.size(); ++p) {
    if (g.assigned(static_cast<int>(p)))
      prod *= ev.best_value(static_cast<int>(p), g.teams[p]);
    else if (enough)
      return 0.0;
  }
  return prod;
}

inline void sorted_insert(std::vector<int>& team, int student) {
  team.insert(std::upper_bound(team.begin(), team.end(), student), student);
}

inline void sorted_erase(std::vector<int>& team, int student) {
  team.erase(std::find(team.begin(), team.end(), student));
}

}  // namespace detail

// The product objective for an explicit assignment. Validates first.
inline double overall_cp(const Instance& inst, Evaluator& ev,
                         const TeamAssignment& g) {
  auto rep = validate_assignment(inst, g);
  if (!rep.ok())
    throw std::invalid_argument("overall_cp: invalid assignment: " +
                                rep.errors.front().message);
  return detail::overall_product(inst, ev, g);
}

inline double overall_cp(const Instance& inst, const TeamAssignment& g) {
  Evaluator ev(inst);
  return overall_cp(inst, ev, g);
}

// Hausdorff-style similarity between two competence sets (coverage-valued,
// so higher means more alike).
inline double hausdorff_similarity(const Instance& inst,
                                   const std::vector<CompetenceId>& c1,
                                   const std::vector<CompetenceId>& c2) {
  if (c1.empty() || c2.empty())
    throw std::domain_error("hausdorff_similarity: empty competence set");
  std::vector<int> a, b;
  for (const auto& id : c1) a.push_back(inst.ontology.index_of(id));
  for (const auto& id : c2) b.push_back(inst.ontology.index_of(id));
  auto min_cvg = [&](const std::vector<int>& from, const std::vector<int>& to) {
    double worst = 1.0;
    for (int c : from)
      worst = std::min(worst, inst.ontology.coverage(c, to, inst.sim_params));
    return worst;
  };
  return std::max(min_cvg(a, b), min_cvg(b, a));
}

// Pre-test deciding whether an exhaustive crossover between two assigned
// programs is worth running: their competence sets must be similar enough,
// and some student in one team must strictly improve the coverage of some
// competence required by the other program.
inline bool potentiality(const Instance& inst, Evaluator& ev, int p1, int p2,
                         const TeamAssignment& g, double hausdorff_threshold) {
  (void)inst;
  if (!g.assigned(p1) || !g.assigned(p2))
    throw std::domain_error("potentiality: both programs must be assigned");
  if (ev.program_set_similarity(p1, p2) < hausdorff_threshold) return false;

  auto improves = [&](int from, int to) {
    const auto& nodes = ev.program_nodes(to);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      double incumbent = 0.0;
      for (int s : g.teams[to])
        incumbent = std::max(incumbent, ev.coverage(s, nodes[j]));
      for (int s : g.teams[from])
        if (ev.coverage(s, nodes[j]) > incumbent) return true;
    }
    return false;
  };
  return improves(p1, p2) || improves(p2, p1);
}

// Best 2-block partition of the two teams' pooled members into sizes
// (m_p1, m_p2). The incumbent split is one of the candidates, so the result
// never loses value. First maximal candidate wins ties.
inline PairMove exhaustive_crossover(const Instance& inst, Evaluator& ev,
                                     int p1, int p2, const TeamAssignment& g) {
  (void)inst;
  std::vector<int> pool = g.teams[p1];
  pool.insert(pool.end(), g.teams[p2].begin(), g.teams[p2].end());
  std::sort(pool.begin(), pool.end());
  const int total = static_cast<int>(pool.size());
  const int m1 = static_cast<int>(g.teams[p1].size());

  PairMove best;
  bool found = false;
  std::vector<int> pick(m1);
  // lexicographic combinations of pool positions for team 1
  auto rec = [&](auto&& self, int slot, int from) -> void {
    if (slot == m1) {
      std::vector<int> t1, t2;
      std::vector<char> taken(total, 0);
      for (int ix : pick) {
        t1.push_back(pool[ix]);
        taken[ix] = 1;
      }
      for (int i = 0; i < total; ++i)
        if (!taken[i]) t2.push_back(pool[i]);
      const double value = ev.best_value(p1, t1) * ev.best_value(p2, t2);
      ++best.candidates_examined;
      if (!found || value > best.value) {
        found = true;
        best.value = value;
        best.team1 = std::move(t1);
        best.team2 = std::move(t2);
      }
      return;
    }
    for (int i = from; i <= total - (m1 - slot); ++i) {
      pick[slot] = i;
      self(self, slot + 1, i + 1);
    }
  };
  rec(rec, 0, 0);
  return best;
}

// Up to `swap_attempts` random replacements of a random member of either
// team by a random available student; the first strict improvement of the
// pair proximity is kept.
inline PairMove local_swaps(const Instance& inst, Evaluator& ev, int p1, int p2,
                            const TeamAssignment& g,
                            const std::vector<int>& available,
                            const SolverConfig& cfg, Rng& rng) {
  (void)inst;
  PairMove incumbent;
  incumbent.team1 = g.teams[p1];
  incumbent.team2 = g.teams[p2];
  incumbent.value = ev.best_value(p1, incumbent.team1) *
                    ev.best_value(p2, incumbent.team2);
  if (available.empty()) return incumbent;

  const int m1 = static_cast<int>(incumbent.team1.size());
  const int m2 = static_cast<int>(incumbent.team2.size());
  for (int attempt = 0; attempt < cfg.swap_attempts; ++attempt) {
    const int pos = static_cast<int>(uniform_int(rng, 0, m1 + m2 - 1));
    const int sub = available[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<std::int64_t>(available.size()) - 1))];
    std::vector<int> t1 = incumbent.team1;
    std::vector<int> t2 = incumbent.team2;
    if (pos < m1) {
      detail::sorted_erase(t1, incumbent.team1[pos]);
      detail::sorted_insert(t1, sub);
    } else {
      detail::sorted_erase(t2, incumbent.team2[pos - m1]);
      detail::sorted_insert(t2, sub);
    }
    const double value = ev.best_value(p1, t1) * ev.best_value(p2, t2);
    ++incumbent.candidates_examined;
    if (value > incumbent.value) {
      incumbent.value = value;
      incumbent.team1 = std::move(t1);
      incumbent.team2 = std::move(t2);
      return incumbent;
    }
  }
  return incumbent;
}

// One systematic first-improvement sweep: for every program, for every team
// member, try every other student as a replacement (a swap when the student
// is assigned elsewhere, a substitution when available). Improving moves are
// applied immediately and the sweep continues. When a full sweep applies
// nothing, single students are rotated through three teams at once; pairwise
// moves provably stall on 3-cycle optima, so this is the escape hatch that
// the exhaustive crossover cannot provide. Returns the number of moves
// applied.
inline int local_search(const Instance& inst, Evaluator& ev, TeamAssignment& g) {
  const int n_students = static_cast<int>(inst.students.size());
  std::vector<int> owner(n_students, -1);
  for (std::size_t p = 0; p < g.teams.size(); ++p)
    for (int s : g.teams[p]) owner[s] = static_cast<int>(p);

  std::vector<double> val(g.teams.size(), 0.0);
  for (std::size_t p = 0; p < g.teams.size(); ++p)
    if (g.assigned(static_cast<int>(p)))
      val[p] = ev.best_value(static_cast<int>(p), g.teams[p]);

  int moves = 0;
  for (int p = 0; p < static_cast<int>(g.teams.size()); ++p) {
    if (!g.assigned(p)) continue;
    for (std::size_t pos = 0; pos < g.teams[p].size(); ++pos) {
      const int member = g.teams[p][pos];
      for (int t = 0; t < n_students; ++t) {
        if (owner[t] == p) continue;
        const int q = owner[t];
        std::vector<int> new_p = g.teams[p];
        detail::sorted_erase(new_p, member);
        detail::sorted_insert(new_p, t);
        if (q < 0) {
          const double nv = ev.best_value(p, new_p);
          if (nv > val[p]) {
            g.teams[p] = std::move(new_p);
            owner[member] = -1;
            owner[t] = p;
            val[p] = nv;
            ++moves;
            break;
          }
        } else {
          std::vector<int> new_q = g.teams[q];
          detail::sorted_erase(new_q, t);
          detail::sorted_insert(new_q, member);
          const double nv_p = ev.best_value(p, new_p);
          const double nv_q = ev.best_value(q, new_q);
          if (nv_p * nv_q > val[p] * val[q]) {
            g.teams[p] = std::move(new_p);
            g.teams[q] = std::move(new_q);
            owner[member] = q;
            owner[t] = p;
            val[p] = nv_p;
            val[q] = nv_q;
            ++moves;
            break;
          }
        }
      }
    }
  }
  if (moves > 0) return moves;

  // Fixpoint of the single-move sweep. Pairwise moves provably stall on
  // cyclic optima, so rotate single students through two teams plus the
  // available pool, then through three teams. First improvement wins.
  std::vector<int> assigned;
  for (int p = 0; p < static_cast<int>(g.teams.size()); ++p)
    if (g.assigned(p)) assigned.push_back(p);
  const int k = static_cast<int>(assigned.size());

  std::vector<int> available;
  for (int s = 0; s < n_students; ++s)
    if (owner[s] < 0) available.push_back(s);
  if (!available.empty()) {
    for (int ia = 0; ia < k; ++ia)
      for (int ib = 0; ib < k; ++ib) {
        if (ib == ia) continue;
        const int a = assigned[ia], b = assigned[ib];
        for (int x : g.teams[a])      // x: a -> b
          for (int y : g.teams[b])    // y: b -> out
            for (int z : available) { // z: in -> a
              std::vector<int> ta = g.teams[a], tb = g.teams[b];
              detail::sorted_erase(ta, x);
              detail::sorted_insert(ta, z);
              detail::sorted_erase(tb, y);
              detail::sorted_insert(tb, x);
              const double nv_a = ev.best_value(a, ta);
              const double nv_b = ev.best_value(b, tb);
              if (nv_a * nv_b > val[a] * val[b]) {
                g.teams[a] = std::move(ta);
                g.teams[b] = std::move(tb);
                return 1;
              }
            }
      }
  }
  for (int ia = 0; ia < k; ++ia)
    for (int ib = ia + 1; ib < k; ++ib)
      for (int ic = ia + 1; ic < k; ++ic) {
        if (ic == ib) continue;
        const int a = assigned[ia], b = assigned[ib], c = assigned[ic];
        for (int x : g.teams[a])
          for (int y : g.teams[b])
            for (int z : g.teams[c]) {
              std::vector<int> ta = g.teams[a], tb = g.teams[b], tc = g.teams[c];
              detail::sorted_erase(ta, x);
              detail::sorted_insert(ta, z);
              detail::sorted_erase(tb, y);
              detail::sorted_insert(tb, x);
              detail::sorted_erase(tc, z);
              detail::sorted_insert(tc, y);
              const double nv_a = ev.best_value(a, ta);
              const double nv_b = ev.best_value(b, tb);
              const double nv_c = ev.best_value(c, tc);
              if (nv_a * nv_b * nv_c > val[a] * val[b] * val[c]) {
                g.teams[a] = std::move(ta);
                g.teams[b] = std::move(tb);
                g.teams[c] = std::move(tc);
                return 1;
              }
            }
      }
  return 0;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Greedy hardest-first allocation (the caller may fix the order instead).
inline TeamAssignment initial_allocation_impl(
    const Instance& inst, Evaluator& ev, const SolverConfig& cfg,
    const std::optional<std::vector<int>>& order) {
  const int n_students = static_cast<int>(inst.students.size());
  const int n_programs = static_cast<int>(inst.programs.size());
  TeamAssignment g(inst.programs.size());

  std::vector<int> pool(n_students);
  for (int s = 0; s < n_students; ++s) pool[s] = s;

  // Competence hardness over the current pool, refreshed as students leave.
  std::map<int, double> hc;
  auto refresh_hc = [&](const std::vector<int>& programs_left) {
    hc.clear();
    if (pool.empty()) return;
    std::vector<double> cvgs(pool.size());
    for (int p : programs_left)
      for (int node : ev.program_nodes(p)) {
        if (hc.count(node)) continue;
        for (std::size_t i = 0; i < pool.size(); ++i)
          cvgs[i] = ev.coverage(pool[i], node);
        hc[node] = competence_hardness_from_coverages(
            std::span<const double>(cvgs.data(), pool.size()));
      }
  };

  std::vector<double> hp(n_programs, 0.0);
  if ((!order || cfg.hardness_guard) && n_students > 0) {
    std::vector<int> all(n_students);
    for (int s = 0; s < n_students; ++s) all[s] = s;
    for (int p = 0; p < n_programs; ++p)
      hp[p] = program_hardness(inst, inst.programs[p], all, cfg.hardness);
  }

  std::vector<int> sequence;
  if (order) {
    sequence = *order;
  } else {
    sequence.resize(n_programs);
    for (int p = 0; p < n_programs; ++p) sequence[p] = p;
    std::stable_sort(sequence.begin(), sequence.end(),
                     [&](int a, int b) { return hp[a] > hp[b]; });
  }
  if (cfg.hardness_guard)
    std::erase_if(sequence,
                  [&](int p) { return !(hp[p] < *cfg.hardness_guard); });

  std::vector<int> remaining(sequence.begin(), sequence.end());
  refresh_hc(remaining);

  for (std::size_t step = 0; step < sequence.size(); ++step) {
    const int p = sequence[step];
    remaining.erase(std::find(remaining.begin(), remaining.end(), p));
    const int m = inst.programs[p].team_size;
    if (static_cast<int>(pool.size()) < m) continue;

    // Bench selection: cycle through the program's competencies from hardest
    // to easiest, each turn taking the pool student with the best coverage
    // of the current competence.
    const auto& nodes = ev.program_nodes(p);
    std::vector<int> comp_order(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j)
      comp_order[j] = static_cast<int>(j);
    std::stable_sort(comp_order.begin(), comp_order.end(), [&](int a, int b) {
      return hc.at(nodes[a]) > hc.at(nodes[b]);
    });

    std::vector<int> team;
    std::vector<char> chosen(n_students, 0);
    for (int turn = 0; static_cast<int>(team.size()) < m; ++turn) {
      const int node = nodes[comp_order[turn % comp_order.size()]];
      int pick = -1;
      double best_cvg = -1.0;
      for (int s : pool) {
        if (chosen[s]) continue;
        const double c = ev.coverage(s, node);
        if (c > best_cvg) {
          best_cvg = c;
          pick = s;
        }
      }
      chosen[pick] = 1;
      team.push_back(pick);
    }
    std::sort(team.begin(), team.end());
    g.teams[p] = team;
    std::erase_if(pool, [&](int s) { return chosen[s]; });

    if (pool.empty()) break;
    refresh_hc(remaining);
  }
  return g;
}

struct ImproveState {
  std::vector<double> val;     // per program, best team cp (assigned only)
  std::vector<int> assigned;   // program indices with teams
  std::vector<int> available;  // students outside every team
  double current_cp = 1.0;     // ratio-maintained, per the update rule
};

inline ImproveState make_state(const Instance& inst, Evaluator& ev,
                               const TeamAssignment& g) {
  ImproveState st;
  st.val.assign(inst.programs.size(), 0.0);
  for (std::size_t p = 0; p < g.teams.size(); ++p)
    if (g.assigned(static_cast<int>(p))) {
      st.assigned.push_back(static_cast<int>(p));
      st.val[p] = ev.best_value(static_cast<int>(p), g.teams[p]);
    }
  st.available = g.unassigned_students(inst);
  st.current_cp = overall_product(inst, ev, g);
  return st;
}

inline void improve_impl(const Instance& inst, Evaluator& ev,
                         const SolverConfig& cfg, TeamAssignment& g,
                         SolveTrace& trace, Clock::time_point t0,
                         std::uint64_t& iterations_out) {
  ImproveState st = make_state(inst, ev, g);
  Rng rng(cfg.seed);

  auto run_local_search = [&]() {
    const int moves = local_search(inst, ev, g);
    const double before = st.current_cp;
    st = make_state(inst, ev, g);  // re-sync from scratch, bounding fp drift
    // Committed moves only ever improved the objective; a fresh product can
    // still land a few ulps under the ratio-maintained value, so clamp to
    // keep the reported column non-decreasing.
    if (st.current_cp < before) st.current_cp = before;
    return moves > 0;
  };

  if (st.assigned.size() < 2) {
    run_local_search();
    trace.rows.push_back(
        {elapsed_ms(t0), 0, TraceEvent::LocalSearch, st.current_cp});
    iterations_out = 0;
    return;
  }

  std::uint64_t iter = 0;
  int since_improve = 0;
  for (;;) {
    if (1.0 - st.current_cp <= cfg.convergence_epsilon) break;
    if (since_improve >= cfg.patience) break;
    if (cfg.max_iterations && iter >= *cfg.max_iterations) break;
    if (cfg.time_budget_seconds &&
        elapsed_ms(t0) >= *cfg.time_budget_seconds * 1000.0)
      break;
    ++iter;

    const int a = static_cast<int>(
        uniform_int(rng, 0, static_cast<std::int64_t>(st.assigned.size()) - 1));
    int b = static_cast<int>(
        uniform_int(rng, 0, static_cast<std::int64_t>(st.assigned.size()) - 2));
    if (b >= a) ++b;
    const int pk = st.assigned[a];
    const int pl = st.assigned[b];

    const double pair_cp = st.val[pk] * st.val[pl];
    const bool cross = potentiality(inst, ev, pk, pl, g, cfg.hausdorff_threshold);
    const PairMove move =
        cross ? exhaustive_crossover(inst, ev, pk, pl, g)
              : local_swaps(inst, ev, pk, pl, g, st.available, cfg, rng);

    if (move.value > pair_cp) {
      g.teams[pk] = move.team1;
      g.teams[pl] = move.team2;
      st.val[pk] = ev.best_value(pk, g.teams[pk]);
      st.val[pl] = ev.best_value(pl, g.teams[pl]);
      st.available = g.unassigned_students(inst);
      st.current_cp *= move.value / pair_cp;
      since_improve = 0;
      trace.rows.push_back({elapsed_ms(t0), iter,
                            cross ? TraceEvent::Crossover : TraceEvent::Swap,
                            st.current_cp});
    } else {
      ++since_improve;
    }

    if (cfg.local_search_period > 0 &&
        iter % static_cast<std::uint64_t>(cfg.local_search_period) == 0) {
      if (run_local_search()) since_improve = 0;
      trace.rows.push_back(
          {elapsed_ms(t0), iter, TraceEvent::LocalSearch, st.current_cp});
    }
  }
  iterations_out = iter;
}

}  // namespace detail

// Hardness-ordered greedy allocation. The returned trace has the single
// `initial` row.
inline std::pair<TeamAssignment, SolveTrace> initial_allocation(
    const Instance& inst, const SolverConfig& cfg,
    const std::optional<std::vector<int>>& order = std::nullopt) {
  Evaluator ev(inst);
  const auto t0 = detail::Clock::now();
  TeamAssignment g = detail::initial_allocation_impl(inst, ev, cfg, order);
  SolveTrace trace;
  trace.rows.push_back({detail::elapsed_ms(t0), 0, TraceEvent::Initial,
                        detail::overall_product(inst, ev, g)});
  return {std::move(g), std::move(trace)};
}

// Anytime improvement from a caller-provided starting assignment.
inline std::pair<TeamAssignment, SolveTrace> improve(const Instance& inst,
                                                     const TeamAssignment& g0,
                                                     const SolverConfig& cfg) {
  auto rep = validate_assignment(inst, g0);
  if (!rep.ok())
    throw std::invalid_argument("improve: invalid starting assignment: " +
                                rep.errors.front().message);
  Evaluator ev(inst);
  const auto t0 = detail::Clock::now();
  TeamAssignment g = g0;
  SolveTrace trace;
  trace.rows.push_back({detail::elapsed_ms(t0), 0, TraceEvent::Initial,
                        detail::overall_product(inst, ev, g)});
  std::uint64_t iterations = 0;
  detail::improve_impl(inst, ev, cfg, g, trace, t0, iterations);
  return {std::move(g), std::move(trace)};
}

// Full pipeline: initial allocation, then improvement, one shared evaluator.
inline SolveResult solve(const Instance& inst, const SolverConfig& cfg) {
  Evaluator ev(inst);
  const auto t0 = detail::Clock::now();
  SolveResult res;
  res.assignment = detail::initial_allocation_impl(inst, ev, cfg, std::nullopt);
  res.trace.rows.push_back(
      {detail::elapsed_ms(t0), 0, TraceEvent::Initial,
       detail::overall_product(inst, ev, res.assignment)});
  detail::improve_impl(inst, ev, cfg, res.assignment, res.trace, t0,
                       res.iterations);
  res.overall_cp = detail::overall_product(inst, ev, res.assignment);
  return res;
}

}  // namespace taip
