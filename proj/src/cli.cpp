#include "dbe/cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace dbe::cli {

std::string to_string(Engine e) {
  switch (e) {
    case Engine::dafsa: return "dafsa";
    case Engine::tabular: return "tabular";
    case Engine::brute: return "brute";
    case Engine::check_all: return "check-all";
  }
  return "unknown";
}

GraphicalModel load_model(const std::string& path, std::optional<Task> task_override) {
  GraphicalModel m = load_instance(path);
  if (task_override) m.task = *task_override;
  m.validate();
  return m;
}

Ordering make_ordering(const GraphicalModel& m, OrderingSource source, const std::string& ordering_file) {
  if (source != OrderingSource::user) return min_fill_ordering(m, source == OrderingSource::weighted_min_fill);
  std::ifstream in(ordering_file);
  if (!in) throw ParseError(0, "cannot open ordering file " + ordering_file);
  std::vector<VarId> order;
  long long x = 0;
  while (in >> x) {
    if (x < 0) throw ParseError(0, "negative variable id in ordering file");
    order.push_back(static_cast<VarId>(x));
  }
  if (!in.eof()) throw ParseError(0, "non-numeric token in ordering file");
  return Ordering::user(std::move(order), m.variable_count());
}

namespace {

struct Outcome {
  std::string text;
  int code = kExitOk;
};

std::string emit(const ResultRecord& r, OutputFormat f) {
  return f == OutputFormat::json_lines ? format_json_line(r) : format_human(r);
}

// Verdict of a reference engine against the primary result.
std::string compare(const GraphicalModel& m, const SolverResult& primary, const SolverResult& other) {
  if (primary.status != other.status) return "disagree: feasibility";
  if (primary.status == SolveStatus::infeasible) return "agree";
  if (!values_agree(m.task, primary.optimum, other.optimum))
    return "disagree: optimum " + dbe::to_string(other.optimum);
  if (!values_agree(m.task, evaluate(m, other.assignment), other.optimum)) return "disagree: certificate";
  return "agree";
}

Outcome solve_one(const RunConfig& config, const std::string& path) {
  ResultRecord r;
  r.file = path;
  r.engine = to_string(config.engine);
  r.include_timings = config.timings;

  GraphicalModel m;
  Ordering d;
  try {
    m = load_model(path, config.task_override);
    d = make_ordering(m, config.ordering, config.ordering_file);
  } catch (const std::exception& e) {
    r.status = "error";
    r.message = e.what();
    return {emit(r, config.format), kExitUsage};
  }
  r.task = m.task;
  for (const TabularFactor& t : m.factors) r.redundancy.push_back(redundancy(t, config.epsilon));

  const Deadline deadline(std::chrono::duration<double>(config.time_limit_seconds));
  int code = kExitOk;
  try {
    SolverResult res;
    switch (config.engine) {
      case Engine::tabular:
        res = tabular_be(m, d, config.budget, deadline);
        res.stats.induced_width = induced_width(m, d);
        break;
      case Engine::brute:
        res = brute_force(m, config.budget, deadline);
        res.stats.induced_width = induced_width(m, d);
        break;
      case Engine::dafsa:
      case Engine::check_all: {
        EliminationOptions opts;
        opts.epsilon = config.epsilon;
        opts.drop_infinity = config.prune_infinity;
        opts.deadline = deadline;
        res = bucket_elimination(m, d, opts);
        break;
      }
    }
    r.status = res.status == SolveStatus::optimal ? "optimal" : "infeasible";
    if (res.status == SolveStatus::optimal) {
      r.optimum = res.optimum;
      r.assignment = res.assignment;
    }
    r.stats = res.stats;

    if (config.engine == Engine::check_all) {
      bool ok = true;
      if (res.status == SolveStatus::optimal && !values_agree(m.task, evaluate(m, res.assignment), res.optimum)) {
        r.checks.emplace_back("certificate", "disagree");
        ok = false;
      } else {
        r.checks.emplace_back("certificate", "agree");
      }
      auto check = [&](const std::string& name, auto&& solve) {
        try {
          std::string verdict = compare(m, res, solve());
          ok = ok && verdict == "agree";
          r.checks.emplace_back(name, verdict);
        } catch (const OverBudget&) {
          r.checks.emplace_back(name, "over_budget");
        }
      };
      check("tabular", [&] { return tabular_be(m, d, config.budget, deadline); });
      check("brute", [&] { return brute_force(m, config.budget, deadline); });
      if (!ok) {
        r.status = "disagreement";
        code = kExitDisagreement;
      }
    }
  } catch (const TimeLimitExceeded&) {
    r.status = "timeout";
    r.optimum.reset();
    r.assignment.clear();
  } catch (const OverBudget& e) {
    r.status = "over_budget";
    r.message = e.what();
    r.stats = SolverStats{};
    r.stats.induced_width = induced_width(m, d);
  } catch (const std::exception& e) {
    r.status = "error";
    r.message = e.what();
    code = kExitInternal;
  }
  return {emit(r, config.format), code};
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.inputs.empty()) {
    err << "error: no input files\n";
    return kExitUsage;
  }
  if (!(config.epsilon > 0.0)) {
    err << "error: epsilon must be positive\n";
    return kExitUsage;
  }
  std::vector<Outcome> outcomes(config.inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.inputs.size(); i = next++) outcomes[i] = solve_one(config, config.inputs[i]);
  };
  const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, config.inputs.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  int code = kExitOk;
  for (const Outcome& o : outcomes) {
    out << o.text;
    code = std::max(code, o.code);
  }
  return code;
}

int stats(const StatsConfig& config, std::ostream& out, std::ostream& err) {
  if (config.inputs.empty()) {
    err << "error: no input files\n";
    return kExitUsage;
  }
  nlohmann::ordered_json instances = nlohmann::ordered_json::array();
  std::ostringstream csv;
  csv << "file,task,variables,factors,max_arity,mean_arity,max_domain,induced_width,redundancy_mean\n";
  double sum = 0.0;
  std::size_t counted = 0;
  int code = kExitOk;
  for (const std::string& path : config.inputs) {
    try {
      const GraphicalModel m = load_model(path, config.task_override);
      const Ordering d = make_ordering(m, config.ordering, config.ordering_file);
      std::vector<double> red;
      std::size_t max_arity = 0, arity_sum = 0;
      for (const TabularFactor& t : m.factors) {
        red.push_back(redundancy(t, config.epsilon));
        max_arity = std::max(max_arity, t.scope.size());
        arity_sum += t.scope.size();
      }
      double mean = 0.0;
      for (double x : red) mean += x;
      mean = red.empty() ? 0.0 : mean / static_cast<double>(red.size());
      const double mean_arity =
          m.factors.empty() ? 0.0 : static_cast<double>(arity_sum) / static_cast<double>(m.factors.size());
      std::uint32_t max_domain = 0;
      for (std::uint32_t k : m.domains) max_domain = std::max(max_domain, k);
      const std::size_t width = induced_width(m, d);
      sum += mean;
      ++counted;

      nlohmann::ordered_json j;
      j["file"] = path;
      j["task"] = dbe::to_string(m.task);
      j["variables"] = m.variable_count();
      j["factors"] = m.factors.size();
      j["max_arity"] = max_arity;
      j["mean_arity"] = mean_arity;
      j["max_domain"] = max_domain;
      j["induced_width"] = width;
      j["redundancy"] = red;
      j["redundancy_mean"] = mean;
      instances.push_back(j);
      csv << path << ',' << dbe::to_string(m.task) << ',' << m.variable_count() << ',' << m.factors.size() << ','
          << max_arity << ',' << mean_arity << ',' << max_domain << ',' << width << ',' << mean << '\n';
    } catch (const std::exception& e) {
      err << path << ": " << e.what() << '\n';
      code = kExitUsage;
    }
  }
  const double aggregate = counted == 0 ? 0.0 : sum / static_cast<double>(counted);
  if (config.format == StatsFormat::json) {
    nlohmann::ordered_json j;
    j["instances"] = instances;
    j["aggregate"] = {{"instances", counted}, {"redundancy_mean", aggregate}};
    out << j.dump(2) << '\n';
  } else {
    out << csv.str() << "ALL,,,,,,,," << aggregate << '\n';
  }
  return code;
}

}  // namespace dbe::cli
