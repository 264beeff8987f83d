#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dbe/cli.hpp"
#include "dbe/generate.hpp"

using namespace dbe;
namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string& name) { return std::string(DBE_FIXTURES) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dbe_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> micro_corpus(const fs::path& dir, int count) {
  std::vector<std::string> paths;
  for (int i = 0; i < count; ++i) {
    MicroSpec spec;
    spec.task = i % 2 == 0 ? Task::map : Task::wcsp;
    spec.hard_constraints = i % 4 == 3;
    const GraphicalModel m = random_micro_model(1000 + i, spec);
    const fs::path p = dir / (m.name + (m.task == Task::map ? ".uai" : ".wcsp"));
    std::ofstream(p) << (m.task == Task::map ? write_uai(m) : write_wcsp(m));
    paths.push_back(p.string());
  }
  return paths;
}

struct Captured {
  int code;
  std::string out, err;
};

Captured run(const cli::RunConfig& c) {
  std::ostringstream out, err;
  const int code = cli::run(c, out, err);
  return {code, out.str(), err.str()};
}

// Runs the built command-line tool through the shell; returns the exit status.
int shell(const std::string& args, std::string* out = nullptr, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(DBE_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string text;
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof buf, pipe)) text.append(buf, got);
  const int status = pclose(pipe);
  if (out) *out = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("check-all over a micro corpus succeeds") {
  cli::RunConfig c;
  c.inputs = micro_corpus(scratch("micro"), 60);
  c.engine = cli::Engine::check_all;
  c.format = cli::OutputFormat::json_lines;
  const Captured r = run(c);
  CHECK(r.code == cli::kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  int records = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["checks"]["tabular"] == "agree");
    CHECK(j["checks"]["brute"] == "agree");
    CHECK(j["checks"]["certificate"] == "agree");
    ++records;
  }
  CHECK(records == 60);
}

TEST_CASE("empty input list is a usage error") {
  cli::RunConfig c;
  CHECK(run(c).code == cli::kExitUsage);
  cli::StatsConfig s;
  std::ostringstream out, err;
  CHECK(cli::stats(s, out, err) == cli::kExitUsage);
  c.inputs = {fixture("hard.wcsp")};
  c.epsilon = 0.0;
  CHECK(run(c).code == cli::kExitUsage);
}

TEST_CASE("parse errors give a nonzero exit with diagnostics") {
  const fs::path dir = scratch("bad");
  std::ofstream(dir / "bad.uai") << "MARKOV\n1\n2\n1\n1 7\n";
  cli::RunConfig c;
  c.inputs = {(dir / "bad.uai").string(), fixture("hard.wcsp")};
  const Captured r = run(c);
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.out.find("line 5") != std::string::npos);
  CHECK(r.out.find("optimum: 3") != std::string::npos);
}

TEST_CASE("known WCSP optimum appears in the record") {
  cli::RunConfig c;
  c.inputs = {fixture("hard.wcsp")};
  c.format = cli::OutputFormat::json_lines;
  for (cli::Engine e : {cli::Engine::dafsa, cli::Engine::tabular, cli::Engine::brute}) {
    c.engine = e;
    const Captured r = run(c);
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["optimum"] == 3.0);
    CHECK(j["assignment"] == nlohmann::json::array({0, 1, 1}));
    CHECK(j["engine"] == cli::to_string(e));
  }
}

TEST_CASE("json-lines output is deterministic across runs and worker counts") {
  cli::RunConfig c;
  c.inputs = micro_corpus(scratch("det"), 24);
  c.format = cli::OutputFormat::json_lines;
  const Captured a = run(c);
  const Captured b = run(c);
  c.jobs = 4;
  const Captured d = run(c);
  CHECK(a.out == b.out);
  CHECK(a.out == d.out);
  CHECK(a.out.find("wall_time") == std::string::npos);
}

TEST_CASE("user ordering file") {
  const fs::path dir = scratch("order");
  std::ofstream(dir / "order.txt") << "2 0 1\n";
  cli::RunConfig c;
  c.inputs = {fixture("hard.wcsp")};
  c.ordering = OrderingSource::user;
  c.ordering_file = (dir / "order.txt").string();
  CHECK(run(c).code == 0);
  std::ofstream(dir / "order.txt") << "2 0\n";
  CHECK(run(c).code == cli::kExitUsage);
}

TEST_CASE("time limit produces a timeout record without failing") {
  RedundantSpec spec;
  spec.variables = 24;
  spec.factors = 40;
  const GraphicalModel m = redundant_wcsp(5, spec);
  const fs::path p = scratch("timeout") / "slow.wcsp";
  std::ofstream(p) << write_wcsp(m);
  cli::RunConfig c;
  c.inputs = {p.string()};
  c.engine = cli::Engine::brute;
  c.format = cli::OutputFormat::json_lines;
  c.time_limit_seconds = 0.5;
  const auto started = std::chrono::steady_clock::now();
  const Captured r = run(c);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  CHECK(r.code == cli::kExitOk);
  CHECK(nlohmann::json::parse(r.out)["status"] == "timeout");
  // Parsing and ordering happen before the clock starts; allow the 5% slack plus them.
  CHECK(elapsed < 0.5 * 1.05 + 0.1);
}

TEST_CASE("time limit applies to the automaton engine") {
  RedundantSpec spec;
  spec.window = 30;
  const fs::path p = scratch("timeout_dafsa") / "wide.wcsp";
  std::ofstream(p) << write_wcsp(redundant_wcsp(101, spec));
  cli::RunConfig c;
  c.inputs = {p.string()};
  c.format = cli::OutputFormat::json_lines;
  c.time_limit_seconds = 0.05;
  const auto started = std::chrono::steady_clock::now();
  const Captured r = run(c);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  CHECK(r.code == cli::kExitOk);
  CHECK(nlohmann::json::parse(r.out)["status"] == "timeout");
  CHECK(elapsed < 0.05 * 1.05 + 0.1);
}

TEST_CASE("stats reports per-instance and aggregate redundancy") {
  cli::StatsConfig s;
  s.inputs = {fixture("constant.uai"), fixture("value_keyed.wcsp")};
  s.format = cli::StatsFormat::json;
  std::ostringstream out, err;
  REQUIRE(cli::stats(s, out, err) == 0);
  const auto j = nlohmann::json::parse(out.str());
  const auto& inst = j["instances"];
  REQUIRE(inst.size() == 2);
  CHECK(inst[0]["redundancy"][0].get<double>() == doctest::Approx(1.0 - 1.0 / 12));
  CHECK(inst[0]["redundancy"][1].get<double>() == doctest::Approx(1.0 - 1.0 / 3));
  CHECK(inst[1]["redundancy_mean"].get<double>() == doctest::Approx(0.5));
  CHECK(inst[1]["max_arity"] == 3);
  const double mean = (inst[0]["redundancy_mean"].get<double>() + inst[1]["redundancy_mean"].get<double>()) / 2;
  CHECK(j["aggregate"]["redundancy_mean"].get<double>() == doctest::Approx(mean));

  s.format = cli::StatsFormat::csv;
  std::ostringstream csv;
  REQUIRE(cli::stats(s, csv, err) == 0);
  CHECK(csv.str().rfind("file,task,", 0) == 0);
  CHECK(csv.str().find("\nALL,") != std::string::npos);
}

TEST_CASE("command-line tool exit codes and epsilon override") {
  std::string out;
  CHECK(shell("solve", &out) == cli::kExitUsage);
  CHECK(shell("", &out) == cli::kExitUsage);
  CHECK(shell("solve --engine nope " + fixture("hard.wcsp")) == cli::kExitUsage);
  CHECK(shell("solve --format json-lines " + fixture("hard.wcsp"), &out) == 0);
  CHECK(nlohmann::json::parse(out)["optimum"] == 3.0);
  CHECK(shell("solve " + fixture("missing.wcsp")) == cli::kExitUsage);
  CHECK(shell("solve --engine check-all " + fixture("asia.uai") + " " + fixture("uai_doc.uai")) == 0);
  CHECK(shell("solve " + fixture("hard.wcsp"), &out, "DBE_EPSILON=abc") == cli::kExitUsage);
  // With epsilon 1.5 the costs 1 and 2 share a key: 3 keys over 8 rows.
  const std::string stats_args = "stats --format json " + fixture("value_keyed.wcsp");
  REQUIRE(shell(stats_args, &out, "DBE_EPSILON=1.5") == 0);
  CHECK(nlohmann::json::parse(out)["aggregate"]["redundancy_mean"].get<double>() == doctest::Approx(0.625));
  REQUIRE(shell(stats_args + " --epsilon 1e-10", &out, "DBE_EPSILON=1.5") == 0);
  CHECK(nlohmann::json::parse(out)["aggregate"]["redundancy_mean"].get<double>() == doctest::Approx(0.5));
  const fs::path dir = scratch("generate");
  CHECK(shell("generate --kind micro --count 3 --out " + dir.string(), &out) == 0);
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 3);
}
