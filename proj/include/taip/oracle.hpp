#pragma once

// Ground truth for small instances: exhaustive enumeration of maximal
// feasible assignments, the closed-form search-space counts, the exact
// optimum, and an LP-format export of the binary-program encoding (for
// external MILP solvers; nothing here solves it).

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "taip/proximity.hpp"

namespace taip {

using BigInt = boost::multiprecision::cpp_int;

enum class CountCase { ExactFit, SurplusStudents, ShortageStudents };

inline const char* to_string(CountCase c) {
  switch (c) {
    case CountCase::ExactFit: return "exact-fit";
    case CountCase::SurplusStudents: return "surplus-students";
    case CountCase::ShortageStudents: return "shortage-students";
  }
  return "?";
}

struct CountBreakdown {
  CountCase case_kind = CountCase::ExactFit;
  // (team size, number of programs requiring it), sizes ascending
  std::vector<std::pair<int, int>> buckets;
  BigInt total = 0;
  // ShortageStudents only: the maximal staffable program subsets (by index)
  // with the assignment count each contributes
  std::vector<std::pair<std::vector<int>, BigInt>> covers;
};

namespace detail {

inline BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// N! / (prod_p m_p! * (N - sum_p m_p)!) — disjoint labeled teams out of N
// students, leftovers unordered.
inline BigInt labeled_team_count(int n_students, const std::vector<int>& sizes) {
  int used = 0;
  BigInt denom = 1;
  for (int m : sizes) {
    used += m;
    denom *= factorial(m);
  }
  if (used > n_students) return 0;
  denom *= factorial(n_students - used);
  return factorial(n_students) / denom;
}

// Maximal subsets P' of programs with sum m <= N: no excluded program could
// still be staffed by the leftover students. Deterministic include-first DFS
// over program indices.
inline void for_each_cover(const std::vector<int>& sizes, int n_students,
                           const std::function<void(const std::vector<int>&)>& fn) {
  const int m = static_cast<int>(sizes.size());
  std::vector<int> subset;
  auto rec = [&](auto&& self, int at, int left) -> void {
    if (at == m) {
      for (int p = 0; p < m; ++p) {
        bool in = false;
        for (int q : subset)
          if (q == p) { in = true; break; }
        if (!in && sizes[p] <= left) return;  // not maximal
      }
      fn(subset);
      return;
    }
    if (sizes[at] <= left) {
      subset.push_back(at);
      self(self, at + 1, left - sizes[at]);
      subset.pop_back();
    }
    self(self, at + 1, left);
  };
  rec(rec, 0, n_students);
}

// All assignments staffing exactly `programs` (input order) with
// size-compliant disjoint teams; team combinations in lexicographic student
// order. Returns false if the callback stopped the enumeration.
inline bool enumerate_assignments(const Instance& inst,
                                  const std::vector<int>& programs,
                                  TeamAssignment& g, std::vector<char>& used,
                                  std::size_t at,
                                  const std::function<bool(const TeamAssignment&)>& yield) {
  if (at == programs.size()) return yield(g);
  const int p = programs[at];
  const int m = inst.programs[p].team_size;
  const int n = static_cast<int>(inst.students.size());

  std::vector<int> team;
  auto combos = [&](auto&& self, int from) -> bool {
    if (static_cast<int>(team.size()) == m) {
      g.teams[p] = team;
      const bool go = enumerate_assignments(inst, programs, g, used, at + 1, yield);
      g.teams[p].clear();
      return go;
    }
    for (int s = from; s < n; ++s) {
      if (used[s]) continue;
      used[s] = 1;
      team.push_back(s);
      const bool go = self(self, s + 1);
      team.pop_back();
      used[s] = 0;
      if (!go) return false;
    }
    return true;
  };
  return combos(combos, 0);
}

}  // namespace detail

// Closed-form count of maximal feasible assignments, exact integers.
inline CountBreakdown count_feasible(const Instance& inst) {
  CountBreakdown out;
  const int n = static_cast<int>(inst.students.size());
  std::vector<int> sizes;
  int required = 0;
  for (const auto& p : inst.programs) {
    sizes.push_back(p.team_size);
    required += p.team_size;
  }

  std::map<int, int> by_size;
  for (int m : sizes) ++by_size[m];
  for (const auto& [m, cnt] : by_size) out.buckets.emplace_back(m, cnt);

  if (required == n) {
    out.case_kind = CountCase::ExactFit;
    out.total = detail::labeled_team_count(n, sizes);
  } else if (required < n) {
    out.case_kind = CountCase::SurplusStudents;
    out.total = detail::labeled_team_count(n, sizes);
  } else {
    out.case_kind = CountCase::ShortageStudents;
    detail::for_each_cover(sizes, n, [&](const std::vector<int>& subset) {
      std::vector<int> sub_sizes;
      for (int p : subset) sub_sizes.push_back(sizes[p]);
      BigInt c = detail::labeled_team_count(n, sub_sizes);
      out.total += c;
      out.covers.emplace_back(subset, std::move(c));
    });
  }
  return out;
}

// Streams every maximal feasible assignment exactly once, in deterministic
// order. The callback returns false to stop.
inline void enumerate_feasible(const Instance& inst,
                               const std::function<bool(const TeamAssignment&)>& yield) {
  const int n = static_cast<int>(inst.students.size());
  std::vector<int> sizes;
  int required = 0;
  for (const auto& p : inst.programs) {
    sizes.push_back(p.team_size);
    required += p.team_size;
  }
  TeamAssignment g(inst.programs.size());
  std::vector<char> used(n, 0);

  if (required <= n) {
    std::vector<int> all(inst.programs.size());
    for (std::size_t p = 0; p < all.size(); ++p) all[p] = static_cast<int>(p);
    detail::enumerate_assignments(inst, all, g, used, 0, yield);
    return;
  }
  bool stopped = false;
  detail::for_each_cover(sizes, n, [&](const std::vector<int>& subset) {
    if (stopped) return;
    if (!detail::enumerate_assignments(inst, subset, g, used, 0, yield))
      stopped = true;
  });
}

inline std::vector<TeamAssignment> enumerate_feasible(const Instance& inst) {
  std::vector<TeamAssignment> out;
  enumerate_feasible(inst, [&](const TeamAssignment& g) {
    out.push_back(g);
    return true;
  });
  return out;
}

struct OptimumResult {
  TeamAssignment assignment;
  double value = 0.0;
  std::uint64_t enumerated = 0;
};

// Exact optimum by exhaustive enumeration. With a student shortage the
// comparison is lexicographic: staff as many programs as possible, then
// maximize the proximity product over the staffed ones. Refuses instances
// whose search space exceeds `cap`.
inline OptimumResult brute_force_optimum(const Instance& inst, Evaluator& ev,
                                         std::uint64_t cap = 10'000'000) {
  const CountBreakdown count = count_feasible(inst);
  if (count.total > cap)
    throw std::runtime_error(
        "brute_force_optimum: search space has " + count.total.str() +
        " assignments, above the cap of " + std::to_string(cap));

  OptimumResult best;
  best.assignment = TeamAssignment(inst.programs.size());
  int best_assigned = -1;
  enumerate_feasible(inst, [&](const TeamAssignment& g) {
    ++best.enumerated;
    double value = 1.0;
    int assigned = 0;
    for (std::size_t p = 0; p < g.teams.size(); ++p)
      if (g.assigned(static_cast<int>(p))) {
        ++assigned;
        value *= ev.best_value(static_cast<int>(p), g.teams[p]);
      }
    if (assigned > best_assigned ||
        (assigned == best_assigned && value > best.value)) {
      best_assigned = assigned;
      best.value = value;
      best.assignment = g;
    }
    return true;
  });
  if (best_assigned < 0)
    throw std::runtime_error("brute_force_optimum: nothing to enumerate");
  return best;
}

inline OptimumResult brute_force_optimum(const Instance& inst,
                                         std::uint64_t cap = 10'000'000) {
  Evaluator ev(inst);
  return brute_force_optimum(inst, ev, cap);
}

// Two objectives: log(1+cp) keeps coefficients finite for zero-proximity
// teams but is not a monotone transform of the product, so the two modes can
// select different assignments.
enum class LpObjective {
  Log1p,  // sum x * log(1 + cp)
  Log,    // sum x * log(cp), cp floored; order-equivalent to the product
};

struct LpSummary {
  std::uint64_t variables = 0;
  std::uint64_t constraints = 0;
};

namespace detail {

inline std::string lp_token(const std::string& raw) {
  std::string out;
  for (char c : raw)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  return out;
}

inline std::string format_coef(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace detail

// Writes the binary-program encoding in LP text format: one binary variable
// per size-compliant (team, program) pair, at most one team per program, at
// most one program per student. Variable names embed the program and member
// ids: x__<pid>__<sid>[__<sid>...].
inline LpSummary export_lp(const Instance& inst, LpObjective objective,
                           const std::string& path,
                           std::uint64_t variable_cap = 1'000'000) {
  const int n = static_cast<int>(inst.students.size());

  BigInt var_count = 0;
  for (const auto& p : inst.programs)
    if (p.team_size <= n)
      var_count += detail::factorial(n) / (detail::factorial(p.team_size) *
                                           detail::factorial(n - p.team_size));
  if (var_count > variable_cap)
    throw std::runtime_error("export_lp: encoding needs " + var_count.str() +
                             " variables, above the cap of " +
                             std::to_string(variable_cap));

  Evaluator ev(inst);
  struct Var {
    std::string name;
    double coef;
    int program;
    std::vector<int> team;
  };
  std::vector<Var> vars;
  std::vector<std::vector<std::size_t>> by_student(n);

  for (std::size_t p = 0; p < inst.programs.size(); ++p) {
    const int m = inst.programs[p].team_size;
    if (m > n) continue;
    std::vector<int> team;
    auto combos = [&](auto&& self, int from) -> void {
      if (static_cast<int>(team.size()) == m) {
        const double cp = ev.best_value(static_cast<int>(p), team);
        Var v;
        v.name = "x__" + detail::lp_token(inst.programs[p].id);
        for (int s : team) v.name += "__" + detail::lp_token(inst.students[s].id);
        v.coef = objective == LpObjective::Log1p
                     ? std::log1p(cp)
                     : std::log(std::max(cp, 1e-12));
        v.program = static_cast<int>(p);
        v.team = team;
        for (int s : team) by_student[s].push_back(vars.size());
        vars.push_back(std::move(v));
        return;
      }
      for (int s = from; s < n; ++s) {
        team.push_back(s);
        self(self, s + 1);
        team.pop_back();
      }
    };
    combos(combos, 0);
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_lp: cannot write '" + path + "'");
  out << "\\ TAIPP binary-program encoding (" ;
  out << (objective == LpObjective::Log1p ? "log1p" : "log") << " objective)\n";
  out << "Maximize\n obj:";
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const double c = vars[i].coef;
    out << (c < 0 ? " - " : " + ") << detail::format_coef(std::fabs(c)) << ' '
        << vars[i].name;
    if (i % 4 == 3 && i + 1 < vars.size()) out << "\n     ";
  }
  out << "\nSubject To\n";
  std::uint64_t constraints = 0;
  for (std::size_t p = 0; p < inst.programs.size(); ++p) {
    bool any = false;
    std::string line = " assign__" + detail::lp_token(inst.programs[p].id) + ":";
    for (const auto& v : vars)
      if (v.program == static_cast<int>(p)) {
        line += (any ? " + " : " ") + v.name;
        any = true;
      }
    if (any) {
      out << line << " <= 1\n";
      ++constraints;
    }
  }
  for (int s = 0; s < n; ++s) {
    if (by_student[s].empty()) continue;
    out << " stu__" << detail::lp_token(inst.students[s].id) << ":";
    bool first = true;
    for (std::size_t vi : by_student[s]) {
      out << (first ? " " : " + ") << vars[vi].name;
      first = false;
    }
    out << " <= 1\n";
    ++constraints;
  }
  out << "Binaries\n";
  for (const auto& v : vars) out << ' ' << v.name << '\n';
  out << "End\n";

  LpSummary summary;
  summary.variables = static_cast<std::uint64_t>(vars.size());
  summary.constraints = constraints;
  return summary;
}

}  // namespace taip
