#pragma once

// Reference solvers used to check the DAFSA pipeline. They share only the
// model types with it.

#include <cstddef>
#include <stdexcept>

#include "dbe/deadline.hpp"
#include "dbe/model.hpp"

namespace dbe {

struct OracleBudget {
  std::size_t max_assignments = std::size_t{1} << 24;  // covers 4^12
  // Bound on table cells held at once (stored plus in-flight).
  std::size_t max_table_cells = 10'000'000;
};

class OverBudget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive enumeration; returns the lexicographically lowest optimal
// assignment.
SolverResult brute_force(const GraphicalModel& m, const OracleBudget& budget = {}, const Deadline& deadline = {});

// Bucket elimination over dense tables.
SolverResult tabular_be(const GraphicalModel& m, const Ordering& d, const OracleBudget& budget = {},
                        const Deadline& deadline = {});

}  // namespace dbe
