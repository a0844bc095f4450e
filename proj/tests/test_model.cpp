#include <catch2/catch_amalgamated.hpp>

#include "taip/generator.hpp"
#include "taip/io.hpp"
#include "taip/model.hpp"
#include "test_util.hpp"

using namespace taip;

namespace {

bool has_code(const std::vector<Violation>& vs, const std::string& code) {
  for (const auto& v : vs)
    if (v.code == code) return true;
  return false;
}

}  // namespace

TEST_CASE("validate_instance") {
  const auto tree = testutil::standard_tree();

  SECTION("well-formed instance gives an empty report") {
    auto inst = testutil::instance(
        tree, {testutil::student("s0", {"a1"})},
        {testutil::program("p0", {{"a1", 0.5}}, 1)});
    CHECK(validate_instance(inst).ok());
  }
  SECTION("weight 0 cites the (0,1] bound") {
    auto inst = testutil::instance(
        tree, {testutil::student("s0", {"a1"})},
        {testutil::program("p0", {{"a1", 0.0}}, 1)});
    const auto rep = validate_instance(inst);
    REQUIRE(has_code(rep.errors, "weight-out-of-range"));
    bool cites_bound = false;
    for (const auto& v : rep.errors)
      if (v.message.find("(0,1]") != std::string::npos) cites_bound = true;
    CHECK(cites_bound);
  }
  SECTION("unknown competence") {
    auto inst = testutil::instance(
        tree, {testutil::student("s0", {"not-a-node"})},
        {testutil::program("p0", {{"a1", 0.5}}, 1)});
    const auto rep = validate_instance(inst);
    CHECK(rep.errors.size() == 1);
    CHECK(has_code(rep.errors, "unknown-competence"));
  }
  SECTION("duplicates, empties, bad sizes, bad params") {
    auto inst = testutil::instance(
        tree,
        {testutil::student("s0", {"a1"}), testutil::student("s0", {"a2"}),
         testutil::student("s1", {})},
        {testutil::program("p0", {{"a1", 0.5}}, 0)});
    inst.sim_params = {0.5, 3.0};
    const auto rep = validate_instance(inst);
    CHECK(has_code(rep.errors, "duplicate-id"));
    CHECK(has_code(rep.errors, "empty-competencies"));
    CHECK(has_code(rep.errors, "bad-team-size"));
    CHECK(has_code(rep.errors, "sim-params-out-of-range"));
  }
}

TEST_CASE("student_program_coverage") {
  const auto tree = testutil::standard_tree();

  SECTION("superset of requirements covers fully") {
    auto inst = testutil::instance(
        tree, {testutil::student("s0", {"a1", "a2", "b1"})},
        {testutil::program("p0", {{"a1", 0.5}, {"a2", 0.9}}, 1)});
    CHECK(student_program_coverage(inst, inst.students[0], inst.programs[0]) ==
          1.0);
  }
  SECTION("one zero-coverage requirement annihilates") {
    // b1 sits in an unrelated depth-1 branch: similarity to a1/a2 is 0
    auto inst = testutil::instance(
        tree, {testutil::student("s0", {"a1"})},
        {testutil::program("p0", {{"a1", 0.5}, {"b1", 0.9}}, 1)});
    CHECK(student_program_coverage(inst, inst.students[0], inst.programs[0]) ==
          0.0);
  }
  SECTION("product of per-competence coverages, cross-module identity") {
    auto inst = testutil::instance(
        tree, {testutil::student("s0", {"a1x"})},
        {testutil::program("p0", {{"a1", 0.5}, {"a2", 0.9}}, 1)});
    const auto& o = inst.ontology;
    const double expected = o.coverage("a1", {"a1x"}, inst.sim_params) *
                            o.coverage("a2", {"a1x"}, inst.sim_params);
    CHECK(student_program_coverage(inst, inst.students[0], inst.programs[0]) ==
          expected);
  }
  SECTION("identity holds on generated instances") {
    GeneratorConfig cfg;
    cfg.seed = 4242;
    cfg.num_programs = 4;
    const auto ont = generate_suitable_ontology(cfg);
    const auto inst = generate_instance(ont, cfg);
    for (const auto& s : inst.students)
      for (const auto& p : inst.programs) {
        const auto skills = s.competence_ids();
        double expected = 1.0;
        for (const auto& r : p.competencies)
          expected *= inst.ontology.coverage(r.competence, skills, inst.sim_params);
        REQUIRE(student_program_coverage(inst, s, p) == expected);
      }
  }
}

TEST_CASE("validate_assignment") {
  const auto tree = testutil::standard_tree();
  auto inst = testutil::instance(
      tree,
      {testutil::student("s0", {"a1"}), testutil::student("s1", {"a2"}),
       testutil::student("s2", {"b1"})},
      {testutil::program("p0", {{"a1", 0.5}}, 1),
       testutil::program("p1", {{"a2", 0.5}, {"b1", 0.5}}, 2)});

  SECTION("empty assignment is valid, with warnings") {
    TeamAssignment g(2);
    const auto rep = validate_assignment(inst, g);
    CHECK(rep.ok());
    CHECK(rep.warnings.size() == 2);
  }
  SECTION("complete assignment") {
    TeamAssignment g(2);
    g.teams[0] = {0};
    g.teams[1] = {1, 2};
    const auto rep = validate_assignment(inst, g);
    CHECK(rep.ok());
    CHECK(rep.warnings.empty());
  }
  SECTION("one student in two teams") {
    TeamAssignment g(2);
    g.teams[0] = {0};
    g.teams[1] = {0, 1};
    const auto rep = validate_assignment(inst, g);
    REQUIRE_FALSE(rep.ok());
    CHECK(has_code(rep.errors, "disjointness"));
  }
  SECTION("team size mismatch") {
    TeamAssignment g(2);
    g.teams[1] = {1};
    const auto rep = validate_assignment(inst, g);
    REQUIRE_FALSE(rep.ok());
    CHECK(has_code(rep.errors, "team-size-mismatch"));
  }
}

TEST_CASE("instance JSON round trip") {
  GeneratorConfig cfg;
  cfg.seed = 31337;
  cfg.num_programs = 5;
  cfg.extra_students = 2;
  const auto ont = generate_suitable_ontology(cfg);
  const auto inst = generate_instance(ont, cfg);
  REQUIRE(validate_instance(inst).ok());

  const auto j = instance_to_json(inst);
  const auto back = instance_from_json(j, ".");
  CHECK(instance_to_json(back) == j);
  CHECK(back.students.size() == inst.students.size());
  CHECK(back.programs.size() == inst.programs.size());
  CHECK(back.metadata_json == inst.metadata_json);
  // competence order inside each program survives the round trip
  for (std::size_t p = 0; p < inst.programs.size(); ++p)
    for (std::size_t j2 = 0; j2 < inst.programs[p].competencies.size(); ++j2)
      CHECK(back.programs[p].competencies[j2].competence ==
            inst.programs[p].competencies[j2].competence);
}
