#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dbe/model.hpp"

namespace dbe {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class InstanceFormat { uai, wcsp };

// UAI MARKOV (or BAYES, read as plain factors). Tables are row-major with the
// last listed scope variable varying fastest; scopes are re-sorted on load.
GraphicalModel parse_uai(std::string_view text);
std::string write_uai(const GraphicalModel& m);

// Weighted CSP text format: header `name n max_domain function_count ub`,
// domain sizes, then per function `arity vars... default tuple_count` and its
// tuples. Costs >= ub are infinite.
GraphicalModel parse_wcsp(std::string_view text);
std::string write_wcsp(const GraphicalModel& m);

std::optional<InstanceFormat> format_from_path(const std::filesystem::path& path);
GraphicalModel load_instance(const std::filesystem::path& path, std::optional<InstanceFormat> format = std::nullopt);

// One solved (or failed) instance, as emitted by the command-line tool.
struct ResultRecord {
  std::string file;
  Task task = Task::map;
  std::string engine;
  std::string status;  // optimal, infeasible, timeout, over_budget, disagreement, error
  std::optional<Value> optimum;
  std::vector<std::uint32_t> assignment;
  SolverStats stats;
  std::vector<double> redundancy;  // per input factor
  std::vector<std::pair<std::string, std::string>> checks;  // engine -> verdict
  std::string message;
  bool include_timings = false;
};

std::string format_human(const ResultRecord& r);
std::string format_json_line(const ResultRecord& r);

}  // namespace dbe
