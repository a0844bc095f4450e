#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "taip/generator.hpp"
#include "taip/oracle.hpp"
#include "taip/solver.hpp"
#include "lp_parse.hpp"
#include "test_util.hpp"

using namespace taip;
using testutil::ParsedLp;
using testutil::parse_lp;

namespace {

Instance sized_instance(std::vector<int> team_sizes, int n_students) {
  // one shared competence keeps proximity out of the counting picture
  auto tree = testutil::chain(1);
  std::vector<Student> students;
  for (int i = 0; i < n_students; ++i)
    students.push_back(testutil::student("s" + std::to_string(i), {"c1"}));
  std::vector<Program> programs;
  for (std::size_t p = 0; p < team_sizes.size(); ++p)
    programs.push_back(
        testutil::program("p" + std::to_string(p), {{"c1", 0.5}}, team_sizes[p]));
  return testutil::instance(tree, students, programs);
}

std::string canonical(const TeamAssignment& g) {
  std::string out;
  for (std::size_t p = 0; p < g.teams.size(); ++p) {
    out += "|";
    for (int s : g.teams[p]) out += std::to_string(s) + ",";
  }
  return out;
}

Instance generated(std::uint64_t seed, int programs, int extra = 0) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.num_programs = programs;
  cfg.extra_students = extra;
  return generate_instance(generate_suitable_ontology(cfg), cfg);
}

std::string var_name(const Instance& inst, int p, const std::vector<int>& team) {
  std::string name = "x__" + inst.programs[p].id;
  for (int s : team) name += "__" + inst.students[s].id;
  return name;
}

}  // namespace

TEST_CASE("count anchors") {
  SECTION("two singleton programs, two students: 2") {
    const auto inst = sized_instance({1, 1}, 2);
    const auto c = count_feasible(inst);
    CHECK(c.case_kind == CountCase::ExactFit);
    CHECK(c.total == 2);
    CHECK(enumerate_feasible(inst).size() == 2);
  }
  SECTION("one singleton program, two students: 2") {
    const auto inst = sized_instance({1}, 2);
    const auto c = count_feasible(inst);
    CHECK(c.case_kind == CountCase::SurplusStudents);
    CHECK(c.total == 2);
    CHECK(enumerate_feasible(inst).size() == 2);
  }
  SECTION("two 2-programs, three students: 3 + 3") {
    const auto inst = sized_instance({2, 2}, 3);
    const auto c = count_feasible(inst);
    CHECK(c.case_kind == CountCase::ShortageStudents);
    CHECK(c.total == 6);
    REQUIRE(c.covers.size() == 2);
    CHECK(c.covers[0].second == 3);
    CHECK(c.covers[1].second == 3);
    const auto all = enumerate_feasible(inst);
    CHECK(all.size() == 6);
    for (const auto& g : all) CHECK(g.assigned_count() == 1);
  }
  SECTION("buckets group programs by team size") {
    const auto c = count_feasible(sized_instance({3, 1, 2, 1}, 7));
    REQUIRE(c.buckets.size() == 3);
    CHECK(c.buckets[0] == std::pair<int, int>{1, 2});
    CHECK(c.buckets[1] == std::pair<int, int>{2, 1});
    CHECK(c.buckets[2] == std::pair<int, int>{3, 1});
    // 7! / (3! 1! 2! 1!) with nothing left over
    CHECK(c.total == 420);
  }
}

TEST_CASE("count identity across random instances") {
  Rng rng(424242);
  int case_i = 0, case_ii = 0, case_iii = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 1 + static_cast<int>(uniform_int(rng, 0, 2));
    std::vector<int> sizes;
    int sum = 0;
    for (int p = 0; p < m; ++p) {
      sizes.push_back(1 + static_cast<int>(uniform_int(rng, 0, 2)));
      sum += sizes.back();
    }
    const int delta = static_cast<int>(uniform_int(rng, -2, 2));
    const int n = std::max(1, sum + delta);
    const auto inst = sized_instance(sizes, n);

    const auto c = count_feasible(inst);
    switch (c.case_kind) {
      case CountCase::ExactFit: ++case_i; break;
      case CountCase::SurplusStudents: ++case_ii; break;
      case CountCase::ShortageStudents: ++case_iii; break;
    }

    std::set<std::string> seen;
    std::size_t yielded = 0;
    enumerate_feasible(inst, [&](const TeamAssignment& g) {
      ++yielded;
      REQUIRE(validate_assignment(inst, g).ok());
      REQUIRE(seen.insert(canonical(g)).second);  // no duplicates
      return true;
    });
    REQUIRE(BigInt(yielded) == c.total);
  }
  // all three cases exercised
  CHECK(case_i > 0);
  CHECK(case_ii > 0);
  CHECK(case_iii > 0);
}

TEST_CASE("brute force optimum") {
  SECTION("single program, single possible team") {
    const auto inst = sized_instance({2}, 2);
    Evaluator ev(inst);
    const auto opt = brute_force_optimum(inst, ev);
    CHECK(opt.enumerated == 1);
    CHECK(opt.assignment.teams[0] == std::vector<int>({0, 1}));
    CHECK(opt.value == ev.best_value(0, {0, 1}));
  }
  SECTION("a strictly dominant student is always selected") {
    auto tree = CompetenceOntology::from_edges("r", {{"r", "x"}, {"r", "z"}});
    auto inst = testutil::instance(
        tree,
        {testutil::student("s0", {"z"}), testutil::student("s1", {"x"}),
         testutil::student("s2", {"z"})},
        {testutil::program("p0", {{"x", 0.9}}, 1)});
    Evaluator ev(inst);
    const auto opt = brute_force_optimum(inst, ev);
    CHECK(opt.assignment.teams[0] == std::vector<int>{1});
  }
  SECTION("never below the heuristic, and the cap refuses honestly") {
    for (std::uint64_t seed = 50; seed < 56; ++seed) {
      auto inst = generated(seed, 2);
      Evaluator ev(inst);
      const auto opt = brute_force_optimum(inst, ev);
      SolverConfig cfg;
      cfg.seed = seed;
      const auto res = solve(inst, cfg);
      REQUIRE(opt.value >= res.overall_cp - 1e-12 * opt.value);
    }
    const auto big = sized_instance({3, 3, 3, 3}, 12);
    CHECK_THROWS_WITH(brute_force_optimum(big, 100),
                      Catch::Matchers::ContainsSubstring("369600"));
  }
  SECTION("shortage: staff count dominates the value") {
    // one lucrative big program vs two small ones; staffing both smalls wins
    auto tree = CompetenceOntology::from_edges("r", {{"r", "x"}, {"r", "y"}});
    auto inst = testutil::instance(
        tree,
        {testutil::student("s0", {"x"}), testutil::student("s1", {"y"})},
        {testutil::program("big", {{"x", 0.9}}, 2),
         testutil::program("small1", {{"x", 0.2}}, 1),
         testutil::program("small2", {{"y", 0.2}}, 1)});
    Evaluator ev(inst);
    const auto opt = brute_force_optimum(inst, ev);
    CHECK(opt.assignment.assigned_count() == 2);
    CHECK(opt.assignment.teams[0].empty());
  }
}

TEST_CASE("lp export") {
  SECTION("variable and constraint counts") {
    const auto inst = sized_instance({1}, 3);
    const auto tmp = std::filesystem::temp_directory_path() / "taip_test_a.lp";
    const LpSummary s = export_lp(inst, LpObjective::Log1p, tmp.string());
    CHECK(s.variables == 3);       // C(3,1)
    CHECK(s.constraints == 1 + 3);  // one per program, one per student
    const ParsedLp lp = parse_lp(tmp.string());
    CHECK(lp.objective.size() == 3);
    CHECK(lp.constraints.size() == 4);
    CHECK(lp.binaries.size() == 3);
  }
  SECTION("objective at an indicator vector reproduces sum log1p(cp)") {
    for (std::uint64_t seed = 60; seed < 64; ++seed) {
      auto inst = generated(seed, 2);
      if (inst.students.size() > 6) continue;
      const auto tmp =
          std::filesystem::temp_directory_path() /
          ("taip_test_rt_" + std::to_string(seed) + ".lp");
      export_lp(inst, LpObjective::Log1p, tmp.string());
      const ParsedLp lp = parse_lp(tmp.string());

      Evaluator ev(inst);
      SolverConfig cfg;
      cfg.seed = seed;
      const auto res = solve(inst, cfg);

      double from_file = 0.0, direct = 0.0;
      for (std::size_t p = 0; p < res.assignment.teams.size(); ++p) {
        if (!res.assignment.assigned(static_cast<int>(p))) continue;
        const auto name =
            var_name(inst, static_cast<int>(p), res.assignment.teams[p]);
        REQUIRE(lp.objective.count(name) == 1);
        from_file += lp.objective.at(name);
        direct +=
            std::log1p(ev.best_value(static_cast<int>(p), res.assignment.teams[p]));
      }
      REQUIRE_THAT(from_file, Catch::Matchers::WithinAbs(direct, 1e-9));
    }
  }
  SECTION("log and log1p objectives can disagree about the argmax") {
    // assignment A scores (0.1, ~0.103) and B scores (1, 0.01): the product
    // prefers A, the log1p sum prefers B
    auto tree = CompetenceOntology::from_edges(
        "r", {{"r", "a"}, {"r", "b"}, {"a", "a1"}, {"a", "a2"}});
    auto inst = testutil::instance(
        tree,
        {testutil::student("u", {"b"}), testutil::student("v", {"a1"})},
        {testutil::program("p1", {{"a1", 0.9}}, 1),
         testutil::program("p2", {{"a2", 0.99}}, 1)});
    Evaluator ev(inst);

    const auto opt = brute_force_optimum(inst, ev);
    // product argmax: u on p1 (floor 0.1), v on p2 (sibling similarity ~0.103)
    REQUIRE(opt.assignment.teams[0] == std::vector<int>{0});
    REQUIRE(opt.assignment.teams[1] == std::vector<int>{1});

    // brute-force over the 0/1 vectors satisfying the constraints
    auto best_by = [&](LpObjective objective) {
      const auto tmp = std::filesystem::temp_directory_path() /
                       (objective == LpObjective::Log1p ? "taip_dis_log1p.lp"
                                                        : "taip_dis_log.lp");
      export_lp(inst, objective, tmp.string());
      const ParsedLp lp = parse_lp(tmp.string());
      double best = -1e300;
      std::pair<int, int> arg{-1, -1};  // student on p1, student on p2
      for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) {
          if (s1 == s2) continue;  // student constraint
          const double v = lp.objective.at(var_name(inst, 0, {s1})) +
                           lp.objective.at(var_name(inst, 1, {s2}));
          if (v > best) {
            best = v;
            arg = {s1, s2};
          }
        }
      return arg;
    };
    const auto log1p_arg = best_by(LpObjective::Log1p);
    const auto log_arg = best_by(LpObjective::Log);
    CHECK(log1p_arg == std::pair<int, int>{1, 0});  // disagrees with the product
    CHECK(log_arg == std::pair<int, int>{0, 1});    // agrees with the product
  }
}
