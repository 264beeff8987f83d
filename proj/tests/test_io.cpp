#include <doctest.h>

#include <json.hpp>

#include "dbe/io.hpp"
#include "dbe/generate.hpp"
#include "dbe/oracle.hpp"
#include "support.hpp"

using namespace dbe;

namespace {

std::string fixture(const std::string& name) { return std::string(DBE_FIXTURES) + "/" + name; }

std::size_t error_line(const std::string& text, bool uai) {
  try {
    if (uai) parse_uai(text);
    else parse_wcsp(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("format reference example") {
  const GraphicalModel m = load_instance(fixture("uai_doc.uai"));
  CHECK(m.task == Task::map);
  CHECK(m.domains == std::vector<std::uint32_t>{2, 2, 3});
  REQUIRE(m.factors.size() == 3);
  CHECK(m.factors[2].at(std::vector<std::uint32_t>{1, 2}) == Value(0.189));
  // x0=0 (0.436), x1=1 (0.872), x2=0 (0.811) by hand.
  const double expect = 0.436 * 0.872 * 0.811;
  const SolverResult r = bucket_elimination(m, min_fill_ordering(m));
  CHECK(r.optimum.get() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(r.assignment == std::vector<std::uint32_t>{0, 1, 0});
}

TEST_CASE("scopes listed out of order are re-sorted with their tables") {
  const GraphicalModel m = load_instance(fixture("reversed_scope.uai"));
  const TabularFactor& f = m.factors[0];
  CHECK(f.scope == std::vector<VarId>{0, 1});
  CHECK(f.domains == std::vector<std::uint32_t>{2, 3});
  // File order is (x1, x0) with x0 fastest: row x1*2 + x0 holds 0.1 * (row + 1).
  for (std::uint32_t x0 = 0; x0 < 2; ++x0)
    for (std::uint32_t x1 = 0; x1 < 3; ++x1)
      CHECK(f.at(std::vector<std::uint32_t>{x0, x1}).get() == doctest::Approx(0.1 * (x1 * 2 + x0 + 1)));
}

TEST_CASE("BAYES network reads as plain factors") {
  const GraphicalModel m = load_instance(fixture("asia.uai"));
  CHECK(m.variable_count() == 8);
  CHECK(m.factors.size() == 8);
  // Most probable explanation: no visit, no tuberculosis, non-smoker, no lung
  // cancer, no bronchitis, either false, negative x-ray, no dyspnoea.
  const double expect = 0.99 * 0.99 * 0.5 * 0.99 * 0.7 * 1.0 * 0.95 * 0.9;
  const SolverResult be = bucket_elimination(m, min_fill_ordering(m, true));
  CHECK(be.optimum.get() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(be.assignment == std::vector<std::uint32_t>{1, 1, 1, 1, 1, 1, 1, 1});
  CHECK(values_agree(Task::map, brute_force(m).optimum, be.optimum));
  for (const TabularFactor& t : m.factors) {
    const double r = redundancy(t);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("WCSP fixture with hard costs") {
  const GraphicalModel m = load_instance(fixture("hard.wcsp"));
  CHECK(m.task == Task::wcsp);
  CHECK(m.name == "hard");
  REQUIRE(m.upper_bound.has_value());
  CHECK(*m.upper_bound == 10.0);
  // Default cost equal to the upper bound is forbidden.
  CHECK(m.factors[2].at(std::vector<std::uint32_t>{0, 0}).is_infinite());
  const SolverResult r = bucket_elimination(m, min_fill_ordering(m));
  CHECK(r.optimum == Value(3.0));
  CHECK(r.assignment == std::vector<std::uint32_t>{0, 1, 1});
  CHECK(brute_force(m).optimum == Value(3.0));
}

TEST_CASE("value-keyed fixture matches the hand-built example table") {
  const GraphicalModel m = load_instance(fixture("value_keyed.wcsp"));
  REQUIRE(m.factors.size() == 1);
  CHECK(m.factors[0] == dbe::test::example_table());
  CHECK(redundancy(m.factors[0]) == doctest::Approx(0.5));
}

TEST_CASE("writers round-trip to a fixpoint") {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 100; ++iter) {
    MicroSpec spec;
    spec.task = iter % 2 == 0 ? Task::map : Task::wcsp;
    spec.hard_constraints = iter % 4 == 1;
    const GraphicalModel m = random_micro_model(rng(), spec);
    if (m.task == Task::map) {
      const std::string once = write_uai(m);
      const GraphicalModel back = parse_uai(once);
      CHECK(back.factors == m.factors);
      CHECK(write_uai(back) == once);
    } else {
      const std::string once = write_wcsp(m);
      const GraphicalModel back = parse_wcsp(once);
      CHECK(back.factors == m.factors);
      CHECK(write_wcsp(back) == once);
    }
  }
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(error_line("MARKOV\n2\n2 2\n1\n1 0\n\n3\n0.5 0.5 0.5\n", true) == 7);
  CHECK(error_line("MARKOV\n1\n2\n1\n1 4\n", true) == 5);
  CHECK(error_line("MARKOV\n1\n2\n1\n1 0\n2\n0.5 -1\n", true) == 7);
  CHECK(error_line("MARKOV\n1\n2\n1\n1 0\n2\n0.5 0.5\nextra\n", true) == 8);
  CHECK(error_line("CHAIN\n", true) == 1);
  CHECK(error_line("MARKOV\n1\n2\n1\n1 0\n2\n0.5\n", true) > 0);
  CHECK(error_line("w 1 2 1 5\n2\n1 0 0 2\n0 1\n0 2\n", false) == 5);
  CHECK(error_line("w 1 2 1 5\n2\n1 0 0 1\n3 1\n", false) == 4);
  CHECK(error_line("w 1 2 1 5\n3\n", false) == 2);
  CHECK(error_line("w 1 2 1 5\n2\n-1 0 0 0\n", false) == 3);
  CHECK_THROWS_AS(load_instance(fixture("missing.uai")), ParseError);
  CHECK_THROWS_AS(load_instance("model.txt"), ParseError);
}

TEST_CASE("json-lines records") {
  ResultRecord r;
  r.file = "a.wcsp";
  r.task = Task::wcsp;
  r.engine = "dafsa";
  r.status = "optimal";
  r.optimum = Value(3.0);
  r.assignment = {0, 1, 1};
  r.redundancy = {0.5, 1.0};
  r.stats.wall_time_seconds = 1.25;
  const std::string line = format_json_line(r);
  CHECK(line.back() == '\n');
  CHECK(line.find('\n') == line.size() - 1);
  const auto j = nlohmann::json::parse(line);
  CHECK(j["optimum"] == 3.0);
  CHECK(j["assignment"] == nlohmann::json::array({0, 1, 1}));
  CHECK(j["stats"]["redundancy_mean"] == 0.75);
  CHECK_FALSE(j["stats"].contains("wall_time_seconds"));
  r.include_timings = true;
  CHECK(nlohmann::json::parse(format_json_line(r))["stats"]["wall_time_seconds"] == 1.25);

  r.status = "infeasible";
  r.optimum = Value::infinity();
  CHECK(nlohmann::json::parse(format_json_line(r))["optimum"] == "inf");
  r.optimum.reset();
  CHECK_FALSE(nlohmann::json::parse(format_json_line(r)).contains("optimum"));
  CHECK(format_human(r).find("infeasible") != std::string::npos);
}
