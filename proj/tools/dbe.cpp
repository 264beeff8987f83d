#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "dbe/cli.hpp"
#include "dbe/generate.hpp"
#include "dbe/io.hpp"

namespace {

const std::map<std::string, dbe::Task> kTasks{{"map", dbe::Task::map}, {"wcsp", dbe::Task::wcsp}};
const std::map<std::string, dbe::OrderingSource> kOrderings{{"min-fill", dbe::OrderingSource::min_fill},
                                                            {"weighted-min-fill", dbe::OrderingSource::weighted_min_fill},
                                                            {"file", dbe::OrderingSource::user}};

// DBE_EPSILON applies unless --epsilon was given.
bool epsilon_from_env(double& eps) {
  const char* raw = std::getenv("DBE_EPSILON");
  if (raw == nullptr) return true;
  try {
    std::size_t used = 0;
    eps = std::stod(raw, &used);
    return used == std::string(raw).size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact MAP and weighted CSP solver using bucket elimination over automaton-keyed factors"};
  app.require_subcommand(1);

  dbe::cli::RunConfig run;
  std::optional<dbe::Task> task;
  std::string ordering_name = "weighted-min-fill";
  std::string engine_name = "dafsa";
  std::string format_name = "human";
  bool keep_infinity = false;
  auto* solve = app.add_subcommand("solve", "Solve instances and print one record per instance");
  solve->add_option("inputs", run.inputs, "UAI (.uai) or WCSP (.wcsp) instance files");
  solve->add_option("--task", task, "Override the task inferred from the file format")
      ->transform(CLI::CheckedTransformer(kTasks, CLI::ignore_case));
  auto* solve_eps = solve->add_option("--epsilon", run.epsilon, "Value-keying tolerance (env DBE_EPSILON)");
  solve->add_option("--ordering", ordering_name, "min-fill, weighted-min-fill, or file")
      ->check(CLI::IsMember({"min-fill", "weighted-min-fill", "file"}));
  solve->add_option("--ordering-file", run.ordering_file, "Whitespace separated variable ids, first position first");
  solve->add_option("--time-limit", run.time_limit_seconds, "Per-instance time limit in seconds");
  solve->add_option("--engine", engine_name, "dafsa, tabular, brute, or check-all")
      ->check(CLI::IsMember({"dafsa", "tabular", "brute", "check-all"}));
  solve->add_option("--format", format_name, "human or json-lines")->check(CLI::IsMember({"human", "json-lines"}));
  solve->add_flag("--keep-infinity", keep_infinity, "Keep infinite-cost rows in WCSP factors");
  solve->add_flag("--timings", run.timings, "Include wall time in json-lines records");
  solve->add_option("--jobs,-j", run.jobs, "Instances solved concurrently")->check(CLI::PositiveNumber);
  solve->add_option("--max-assignments", run.budget.max_assignments, "Brute-force assignment budget");
  solve->add_option("--max-table-cells", run.budget.max_table_cells, "Tabular engine live cell budget");

  dbe::cli::StatsConfig st;
  std::optional<dbe::Task> stats_task;
  std::string stats_ordering = "weighted-min-fill";
  std::string stats_format = "csv";
  auto* stats = app.add_subcommand("stats", "Redundancy, width, and arity summary");
  stats->add_option("inputs", st.inputs, "Instance files");
  stats->add_option("--task", stats_task, "Override the task inferred from the file format")
      ->transform(CLI::CheckedTransformer(kTasks, CLI::ignore_case));
  auto* stats_eps = stats->add_option("--epsilon", st.epsilon, "Value-keying tolerance (env DBE_EPSILON)");
  stats->add_option("--ordering", stats_ordering, "min-fill, weighted-min-fill, or file")
      ->check(CLI::IsMember({"min-fill", "weighted-min-fill", "file"}));
  stats->add_option("--ordering-file", st.ordering_file, "Whitespace separated variable ids");
  stats->add_option("--format", stats_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::string kind = "micro";
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  std::size_t count = 10;
  std::string gen_task = "wcsp";
  bool hard = false;
  dbe::RedundantSpec redundant;
  auto* gen = app.add_subcommand("generate", "Write a seeded random corpus");
  gen->add_option("--kind", kind, "micro or redundant")->check(CLI::IsMember({"micro", "redundant"}));
  gen->add_option("--out", out_dir, "Output directory");
  gen->add_option("--seed", seed, "First seed");
  gen->add_option("--count", count, "Number of instances");
  gen->add_option("--task", gen_task, "micro only: map or wcsp")->check(CLI::IsMember({"map", "wcsp"}));
  gen->add_flag("--hard", hard, "micro WCSP only: include infinite costs");
  gen->add_option("--variables", redundant.variables, "redundant only");
  gen->add_option("--factors", redundant.factors, "redundant only");
  gen->add_option("--arity", redundant.arity, "redundant only");
  gen->add_option("--window", redundant.window, "redundant only");
  gen->add_option("--exceptions", redundant.exceptions, "redundant only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? dbe::cli::kExitOk : dbe::cli::kExitUsage;
  }

  try {
    if (*solve) {
      if (solve_eps->count() == 0 && !epsilon_from_env(run.epsilon)) {
        std::cerr << "error: DBE_EPSILON is not a number\n";
        return dbe::cli::kExitUsage;
      }
      run.task_override = task;
      run.ordering = kOrderings.at(ordering_name);
      run.engine = engine_name == "dafsa"     ? dbe::cli::Engine::dafsa
                   : engine_name == "tabular" ? dbe::cli::Engine::tabular
                   : engine_name == "brute"   ? dbe::cli::Engine::brute
                                              : dbe::cli::Engine::check_all;
      run.format = format_name == "json-lines" ? dbe::cli::OutputFormat::json_lines : dbe::cli::OutputFormat::human;
      run.prune_infinity = !keep_infinity;
      return dbe::cli::run(run, std::cout, std::cerr);
    }
    if (*stats) {
      if (stats_eps->count() == 0 && !epsilon_from_env(st.epsilon)) {
        std::cerr << "error: DBE_EPSILON is not a number\n";
        return dbe::cli::kExitUsage;
      }
      st.task_override = stats_task;
      st.ordering = kOrderings.at(stats_ordering);
      st.format = stats_format == "json" ? dbe::cli::StatsFormat::json : dbe::cli::StatsFormat::csv;
      return dbe::cli::stats(st, std::cout, std::cerr);
    }
    std::filesystem::create_directories(out_dir);
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t s = seed + i;
      dbe::GraphicalModel m;
      if (kind == "micro") {
        dbe::MicroSpec spec;
        spec.task = gen_task == "map" ? dbe::Task::map : dbe::Task::wcsp;
        spec.hard_constraints = hard;
        m = dbe::random_micro_model(s, spec);
      } else {
        m = dbe::redundant_wcsp(s, redundant);
      }
      const bool uai = m.task == dbe::Task::map;
      const auto path = std::filesystem::path(out_dir) / (m.name + (uai ? ".uai" : ".wcsp"));
      std::ofstream out(path);
      out << (uai ? dbe::write_uai(m) : dbe::write_wcsp(m));
      std::cout << path.string() << '\n';
    }
    return dbe::cli::kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dbe::cli::kExitInternal;
  }
}
