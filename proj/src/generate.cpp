#include "dbe/generate.hpp"

#include <algorithm>
#include <random>

namespace dbe {

namespace {

std::vector<VarId> pick_scope(std::mt19937_64& rng, std::size_t lo, std::size_t hi, std::size_t arity) {
  std::vector<VarId> pool;
  for (std::size_t x = lo; x < hi; ++x) pool.push_back(static_cast<VarId>(x));
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(arity, pool.size()));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

GraphicalModel random_micro_model(std::uint64_t seed, const MicroSpec& spec) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  GraphicalModel m;
  m.name = "micro-" + std::to_string(seed);
  m.task = spec.task;
  const std::size_t n = uniform(1, spec.max_variables);
  for (std::size_t i = 0; i < n; ++i)
    m.domains.push_back(static_cast<std::uint32_t>(uniform(unit(rng) < 0.1 ? 1 : 2, spec.max_domain)));

  const std::size_t nf = uniform(1, spec.max_factors);
  for (std::size_t f = 0; f < nf; ++f) {
    auto scope = pick_scope(rng, 0, n, uniform(1, spec.max_arity));
    std::vector<std::uint32_t> doms;
    for (VarId x : scope) doms.push_back(m.domains[x]);

    std::vector<Value> palette;
    const std::size_t colors = uniform(1, 4);
    for (std::size_t c = 0; c < colors; ++c) {
      if (spec.task == Task::map) palette.emplace_back(0.3 + 0.7 * unit(rng));
      else palette.emplace_back(static_cast<double>(uniform(0, 5)));
    }
    const double hard_rate = spec.hard_constraints ? 0.1 + 0.3 * unit(rng) : 0.0;
    const Value forbidden = spec.task == Task::wcsp ? Value::infinity() : Value(0.0);
    std::vector<Value> values(table_size(doms));
    for (Value& v : values) v = unit(rng) < hard_rate ? forbidden : palette[uniform(0, palette.size() - 1)];
    m.factors.push_back(TabularFactor::make(std::move(scope), std::move(doms), std::move(values)));
  }
  return m;
}

GraphicalModel redundant_wcsp(std::uint64_t seed, const RedundantSpec& spec) {
  std::mt19937_64 rng(seed);
  GraphicalModel m;
  m.name = "redundant-" + std::to_string(seed);
  m.task = Task::wcsp;
  m.domains.assign(spec.variables, 2);
  const std::size_t window = std::min(spec.window, spec.variables);
  std::uniform_int_distribution<std::size_t> start_of(0, spec.variables - window);
  std::uniform_int_distribution<int> cost_of(1, 3);
  std::bernoulli_distribution penalty(0.5);
  for (std::size_t f = 0; f < spec.factors; ++f) {
    const std::size_t lo = start_of(rng);
    auto scope = pick_scope(rng, lo, lo + window, spec.arity);
    std::vector<std::uint32_t> doms(scope.size(), 2);
    // Penalty factors are free except a few costly cells; preference factors
    // cost the same everywhere except a few free cells.
    const bool is_penalty = penalty(rng);
    const Value base(is_penalty ? 0.0 : static_cast<double>(cost_of(rng)));
    std::vector<Value> values(table_size(doms), base);
    std::uniform_int_distribution<std::size_t> cell(0, values.size() - 1);
    for (std::size_t e = 0; e < spec.exceptions; ++e)
      values[cell(rng)] = Value(is_penalty ? static_cast<double>(cost_of(rng)) : 0.0);
    m.factors.push_back(TabularFactor::make(std::move(scope), std::move(doms), std::move(values)));
  }
  return m;
}

}  // namespace dbe
