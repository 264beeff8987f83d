#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dbe/io.hpp"
#include "dbe/model.hpp"
#include "dbe/oracle.hpp"

namespace dbe::cli {

enum class Engine { dafsa, tabular, brute, check_all };
enum class OutputFormat { human, json_lines };
enum class StatsFormat { csv, json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDisagreement = 2;
inline constexpr int kExitInternal = 3;

struct RunConfig {
  std::vector<std::string> inputs;
  std::optional<Task> task_override;
  double epsilon = kDefaultEpsilon;
  OrderingSource ordering = OrderingSource::weighted_min_fill;
  std::string ordering_file;  // used when ordering == user
  double time_limit_seconds = 7200.0;
  Engine engine = Engine::dafsa;
  OutputFormat format = OutputFormat::human;
  bool prune_infinity = true;
  bool timings = false;  // wall time in json-lines records
  std::size_t jobs = 1;
  OracleBudget budget;
};

struct StatsConfig {
  std::vector<std::string> inputs;
  std::optional<Task> task_override;
  double epsilon = kDefaultEpsilon;
  OrderingSource ordering = OrderingSource::weighted_min_fill;
  std::string ordering_file;
  StatsFormat format = StatsFormat::csv;
};

std::string to_string(Engine e);

// Solves every input and writes one record per instance, in input order.
// Returns the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Per-instance redundancy, width, and arity summary plus corpus aggregate.
int stats(const StatsConfig& config, std::ostream& out, std::ostream& err);

// Loads a model honoring the task override.
GraphicalModel load_model(const std::string& path, std::optional<Task> task_override);

// Ordering from the configured source; `ordering_file` holds whitespace
// separated variable ids, first position first.
Ordering make_ordering(const GraphicalModel& m, OrderingSource source, const std::string& ordering_file);

}  // namespace dbe::cli
