#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>

#include "taip/benchmark.hpp"
#include "taip/generator.hpp"
#include "taip/io.hpp"
#include "test_util.hpp"

using namespace taip;

TEST_CASE("ontology generation") {
  SECTION("branching 1 is a path") {
    GeneratorConfig cfg;
    cfg.ontology_branching = 1;
    cfg.ontology_depth = 3;
    const auto o = generate_ontology(cfg);
    REQUIRE(o.node_count() == 4);
    for (int v = 1; v < 4; ++v) CHECK(o.parent(v) == v - 1);
  }
  SECTION("deterministic and bounded") {
    GeneratorConfig cfg;
    cfg.seed = 7;
    cfg.ontology_branching = 3;
    cfg.ontology_depth = 4;
    const auto a = generate_ontology(cfg);
    const auto b = generate_ontology(cfg);
    CHECK(ontology_to_json(a) == ontology_to_json(b));
    int bound = 0, power = 1;
    for (int d = 0; d <= cfg.ontology_depth; ++d) {
      bound += power;
      power *= cfg.ontology_branching;
    }
    CHECK(a.node_count() <= bound);
  }
}

TEST_CASE("instance generation") {
  SECTION("byte-identical reproduction") {
    GeneratorConfig cfg;
    cfg.seed = 123;
    cfg.num_programs = 6;
    cfg.extra_students = 1;
    const auto ont = generate_suitable_ontology(cfg);
    const auto a = instance_to_json(generate_instance(ont, cfg)).dump(2);
    const auto b = instance_to_json(generate_instance(ont, cfg)).dump(2);
    CHECK(a == b);
  }
  SECTION("validity, weights, and student endowments") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      GeneratorConfig cfg;
      cfg.seed = seed;
      cfg.num_programs = 8;
      cfg.extra_students = 2;
      const auto ont = generate_suitable_ontology(cfg);
      const auto inst = generate_instance(ont, cfg);
      REQUIRE(validate_instance(inst).ok());
      REQUIRE(static_cast<int>(inst.students.size()) ==
              inst.total_required() + cfg.extra_students);
      for (const auto& p : inst.programs) {
        CHECK(p.team_size >= 1);
        CHECK(p.team_size <= 3);
        CHECK(p.competencies.size() >= 2);
        CHECK(p.competencies.size() <= 5);
        for (const auto& r : p.competencies) {
          CHECK(r.weight > 0.0);
          CHECK(r.weight <= 1.0);
          CHECK(r.level == 1.0);
        }
      }
      // each program's tailor-made students cover all its requirements
      int student_at = 0;
      for (const auto& p : inst.programs)
        for (int k = 0; k < p.team_size; ++k, ++student_at) {
          const auto& s = inst.students[student_at];
          const auto skills = s.competence_ids();
          for (const auto& r : p.competencies)
            REQUIRE(inst.ontology.coverage(r.competence, skills,
                                           inst.sim_params) > 0.0);
        }
    }
  }
  SECTION("uniform team sizes and competence counts (chi-square)") {
    GeneratorConfig cfg;
    cfg.seed = 908070;
    cfg.num_programs = 1000;
    const auto ont = generate_suitable_ontology(cfg);
    const auto inst = generate_instance(ont, cfg);

    std::map<int, int> m_counts, c_counts;
    for (const auto& p : inst.programs) {
      ++m_counts[p.team_size];
      ++c_counts[static_cast<int>(p.competencies.size())];
    }
    auto chi2 = [](const std::map<int, int>& counts, int categories, int total) {
      const double expected = double(total) / categories;
      double stat = 0.0;
      for (const auto& [k, n] : counts) {
        const double d = n - expected;
        stat += d * d / expected;
      }
      return stat;
    };
    // critical values at p = 0.001
    CHECK(chi2(m_counts, 3, 1000) < 13.8155);  // df = 2
    CHECK(chi2(c_counts, 4, 1000) < 16.2662);  // df = 3
    CHECK(m_counts.size() == 3);
    CHECK(c_counts.size() == 4);
  }
  SECTION("ten-program family: mean N brackets 20.5") {
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      GeneratorConfig cfg;
      cfg.seed = seed;
      cfg.num_programs = 10;
      const auto ont = generate_suitable_ontology(cfg);
      total += static_cast<double>(generate_instance(ont, cfg).students.size());
    }
    const double mean = total / 20.0;
    CHECK(mean >= 17.0);
    CHECK(mean <= 25.0);
  }
  SECTION("too-shallow ontology is a generation error") {
    GeneratorConfig cfg;
    cfg.ontology_branching = 1;
    cfg.ontology_depth = 2;  // 2 selectable nodes < 5 required
    const auto ont = generate_ontology(cfg);
    CHECK_THROWS_AS(generate_instance(ont, cfg), std::runtime_error);
  }
}

TEST_CASE("benchmark report") {
  std::vector<std::pair<std::string, Instance>> instances;
  for (std::uint64_t seed = 5000; instances.size() < 3; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.num_programs = 2 + static_cast<int>(seed % 2);
    const auto ont = generate_suitable_ontology(cfg);
    auto inst = generate_instance(ont, cfg);
    if (inst.total_required() > 8) continue;
    instances.emplace_back("i" + std::to_string(seed), std::move(inst));
  }

  BenchmarkOptions opt;
  opt.seeds = {1, 2};
  const BenchmarkReport report = run_benchmark(instances, opt);
  REQUIRE(report.runs.size() == 6);

  for (const auto& run : report.runs) {
    CHECK(run.oracle_exact);
    const double initial_ratio =
        BenchmarkReport::ratio(run.initial_cp, run.reference);
    CHECK(initial_ratio >= 0.0);
    CHECK(initial_ratio <= 1.0 + 1e-12);
    CHECK_THAT(BenchmarkReport::ratio(run.final_cp, run.reference),
               Catch::Matchers::WithinAbs(1.0, 1e-9));
    for (std::size_t i = 1; i < run.trace.rows.size(); ++i)
      CHECK(run.trace.rows[i].overall_cp >= run.trace.rows[i - 1].overall_cp);
  }

  SECTION("csv emission") {
    std::ostringstream per, summary;
    write_per_instance_csv(report, per);
    write_summary_csv(report, summary, 10);
    CHECK(per.str().find("instance,seed,elapsed_ms,iteration,event,overall_cp,"
                         "quality_ratio") == 0);
    CHECK(summary.str().find("# runs: 6") != std::string::npos);
    // aggregate curve is non-decreasing in time
    std::istringstream in(summary.str());
    std::string line;
    double prev = -1.0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line[0] == 't') continue;
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      const double mean = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      CHECK(mean >= prev - 1e-12);
      prev = mean;
    }
  }
}

TEST_CASE("hardness curve") {
  const auto curve = hardness_curve(101);
  REQUIRE(curve.size() == 101);
  CHECK(curve.front().first == 0.0);
  CHECK(curve.back().first == 1.0);
  CHECK_THAT(curve.front().second,
             Catch::Matchers::WithinAbs(2 * std::log(2.0), 1e-12));
  CHECK(curve.back().second == 0.0);
  CHECK_THAT(curve[50].second,
             Catch::Matchers::WithinAbs(std::log(2.0), 1e-12));
  for (const auto& [x, h] : curve) {
    CHECK(h >= 0.0);
    CHECK(h <= 2 * std::log(2.0) + 1e-12);
  }
}
