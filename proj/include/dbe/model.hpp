#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dbe/deadline.hpp"
#include "dbe/factor.hpp"

namespace dbe {

// MAP: maximize the product of factors. WCSP: minimize the sum of costs.
enum class Task { map, wcsp };

constexpr CombineOp combine_op(Task t) { return t == Task::map ? CombineOp::product : CombineOp::sum; }
constexpr ProjectOp project_op(Task t) { return t == Task::map ? ProjectOp::max : ProjectOp::min; }
std::string to_string(Task t);

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GraphicalModel {
  std::string name;
  Task task = Task::map;
  std::vector<std::uint32_t> domains;
  std::vector<TabularFactor> factors;
  // WCSP only: costs at or above this bound are infinite.
  std::optional<double> upper_bound;

  std::size_t variable_count() const { return domains.size(); }
  // Throws ModelError unless every factor is consistent with the domains.
  void validate() const;
};

// Objective at a full assignment; infinity when some factor forbids it.
Value evaluate(const GraphicalModel& m, std::span<const std::uint32_t> assignment);

// Sorted neighbor lists; no self loops.
using Adjacency = std::vector<std::vector<VarId>>;
Adjacency primal_graph(const GraphicalModel& m);

enum class OrderingSource { min_fill, weighted_min_fill, user };

// `order[i]` is the variable at position i. Buckets are processed from the
// last position to the first, so order.back() is eliminated first.
struct Ordering {
  std::vector<VarId> order;
  OrderingSource source = OrderingSource::user;

  static Ordering user(std::vector<VarId> order, std::size_t variable_count);
  std::vector<std::size_t> positions() const;
};

// Greedy min-fill. The weighted variant charges each fill edge the product of
// its endpoints' domain sizes. Ties go to the lowest variable id.
Ordering min_fill_ordering(const GraphicalModel& m, bool weighted = false);

// Largest neighbor count of a variable at its elimination step along `d`.
std::size_t induced_width(const GraphicalModel& m, const Ordering& d);

struct SolverStats {
  std::size_t induced_width = 0;
  std::size_t buckets_processed = 0;
  std::size_t max_entry_count = 0;
  std::size_t max_automaton_states = 0;
  // Peak over the run of total automaton states (DAFSA engine) or table
  // cells (tabular engine) held by stored and in-flight factors.
  std::size_t peak_logical_size = 0;
  std::size_t determinizations = 0;
  double determinization_growth_avg = 0.0;
  double determinization_growth_max = 0.0;
  double wall_time_seconds = 0.0;
};

enum class SolveStatus { optimal, infeasible };

struct SolverResult {
  SolveStatus status = SolveStatus::optimal;
  Value optimum;
  std::vector<std::uint32_t> assignment;  // empty when infeasible
  SolverStats stats;
};

struct EliminationOptions {
  double epsilon = kDefaultEpsilon;
  // WCSP only: leave infinite-cost assignments out of factor representations.
  bool drop_infinity = true;
  Deadline deadline;
};

inline constexpr double kProductRelativeTolerance = 1e-6;
inline constexpr double kSumAbsoluteTolerance = 1e-9;

// Optimum comparison: relative tolerance for MAP, absolute for WCSP;
// infinity agrees only with infinity.
bool values_agree(Task t, Value a, Value b);

SolverResult bucket_elimination(const GraphicalModel& m, const Ordering& d, const EliminationOptions& options = {});

}  // namespace dbe
