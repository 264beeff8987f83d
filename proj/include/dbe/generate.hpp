#pragma once

// Seeded random instance generators for tests, acceptance runs, and the
// `generate` subcommand.

#include <cstdint>

#include "dbe/model.hpp"

namespace dbe {

struct MicroSpec {
  Task task = Task::wcsp;
  std::size_t max_variables = 12;
  std::uint32_t max_domain = 4;
  std::size_t max_factors = 12;
  std::size_t max_arity = 3;
  // Some cells become forbidden: infinite cost (WCSP) or probability 0 (MAP).
  bool hard_constraints = false;
};

// Small random model; factor values come from a per-factor palette of at most
// four values so that tables carry some redundancy.
GraphicalModel random_micro_model(std::uint64_t seed, const MicroSpec& spec);

struct RedundantSpec {
  std::size_t variables = 30;
  std::size_t factors = 40;
  std::size_t arity = 6;
  // Cells of each factor that deviate from the factor's constant cost.
  std::size_t exceptions = 1;
  // Each factor spans a window of this many consecutive variables.
  std::size_t window = 17;
};

// Binary WCSP of sparse cost functions: each factor is constant (0, or 1 to 3)
// except for a few cells (costing 1 to 3, or 0, respectively). Scopes are drawn from sliding windows, which bounds
// the induced width under min-fill to roughly the window size.
GraphicalModel redundant_wcsp(std::uint64_t seed, const RedundantSpec& spec);

}  // namespace dbe
