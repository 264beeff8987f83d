#include "dbe/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

namespace dbe {

std::string to_string(Task t) { return t == Task::map ? "map" : "wcsp"; }

bool values_agree(Task t, Value a, Value b) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
  const double diff = std::abs(a.get() - b.get());
  if (t == Task::wcsp) return diff <= kSumAbsoluteTolerance;
  return diff <= kProductRelativeTolerance * std::max(std::abs(a.get()), std::abs(b.get()));
}

void GraphicalModel::validate() const {
  for (std::uint32_t d : domains)
    if (d == 0) throw ModelError("variable with empty domain");
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const TabularFactor& t = factors[f];
    const std::string where = "factor " + std::to_string(f) + ": ";
    if (t.scope.size() != t.domains.size()) throw ModelError(where + "scope/domain length mismatch");
    for (std::size_t i = 0; i < t.scope.size(); ++i) {
      if (t.scope[i] >= domains.size()) throw ModelError(where + "scope variable out of range");
      if (i > 0 && t.scope[i - 1] >= t.scope[i]) throw ModelError(where + "scope not strictly increasing");
      if (t.domains[i] != domains[t.scope[i]]) throw ModelError(where + "domain disagrees with the model");
    }
    if (t.values.size() != table_size(t.domains)) throw ModelError(where + "table length mismatch");
    for (Value v : t.values) {
      if (std::isnan(v.get())) throw ModelError(where + "NaN value");
      if (task == Task::map && (v.is_infinite() || v.get() < 0.0))
        throw ModelError(where + "MAP values must be finite and non-negative");
      if (task == Task::wcsp && v.get() == -std::numeric_limits<double>::infinity())
        throw ModelError(where + "cost of -infinity");
    }
  }
}

Value evaluate(const GraphicalModel& m, std::span<const std::uint32_t> assignment) {
  const CombineOp op = combine_op(m.task);
  Value total = identity_value(op);
  std::vector<std::uint32_t> local;
  for (const TabularFactor& t : m.factors) {
    local.clear();
    for (VarId x : t.scope) local.push_back(assignment[x]);
    total = combine_values(total, t.at(local), op);
  }
  return total;
}

Adjacency primal_graph(const GraphicalModel& m) {
  std::vector<std::set<VarId>> sets(m.variable_count());
  for (const TabularFactor& t : m.factors)
    for (VarId a : t.scope)
      for (VarId b : t.scope)
        if (a != b) sets[a].insert(b);
  Adjacency adj(m.variable_count());
  for (std::size_t v = 0; v < sets.size(); ++v) adj[v].assign(sets[v].begin(), sets[v].end());
  return adj;
}

Ordering Ordering::user(std::vector<VarId> order, std::size_t variable_count) {
  if (order.size() != variable_count) throw ModelError("ordering length differs from variable count");
  std::vector<char> seen(variable_count, 0);
  for (VarId x : order) {
    if (x >= variable_count || seen[x]) throw ModelError("ordering is not a permutation");
    seen[x] = 1;
  }
  return Ordering{std::move(order), OrderingSource::user};
}

std::vector<std::size_t> Ordering::positions() const {
  std::vector<std::size_t> pos(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  return pos;
}

Ordering min_fill_ordering(const GraphicalModel& m, bool weighted) {
  const std::size_t n = m.variable_count();
  const Adjacency initial = primal_graph(m);
  std::vector<std::set<VarId>> adj(n);
  for (std::size_t v = 0; v < n; ++v) adj[v].insert(initial[v].begin(), initial[v].end());

  auto fill_score = [&](VarId v) {
    double score = 0.0;
    for (auto a = adj[v].begin(); a != adj[v].end(); ++a)
      for (auto b = std::next(a); b != adj[v].end(); ++b)
        if (!adj[*a].contains(*b))
          score += weighted ? static_cast<double>(m.domains[*a]) * m.domains[*b] : 1.0;
    return score;
  };

  std::vector<double> score(n);
  std::vector<char> removed(n, 0);
  for (VarId v = 0; v < n; ++v) score[v] = fill_score(v);

  Ordering d;
  d.source = weighted ? OrderingSource::weighted_min_fill : OrderingSource::min_fill;
  d.order.assign(n, 0);
  for (std::size_t step = 0; step < n; ++step) {
    VarId pick = 0;
    bool found = false;
    for (VarId v = 0; v < n; ++v) {
      if (removed[v]) continue;
      if (!found || score[v] < score[pick]) {
        pick = v;
        found = true;
      }
    }
    d.order[n - 1 - step] = pick;
    removed[pick] = 1;

    const std::vector<VarId> nbrs(adj[pick].begin(), adj[pick].end());
    for (VarId a : nbrs) {
      adj[a].erase(pick);
      for (VarId b : nbrs)
        if (a != b) adj[a].insert(b);
    }
    adj[pick].clear();

    std::set<VarId> dirty(nbrs.begin(), nbrs.end());
    for (VarId a : nbrs) dirty.insert(adj[a].begin(), adj[a].end());
    for (VarId v : dirty) score[v] = fill_score(v);
  }
  return d;
}

std::size_t induced_width(const GraphicalModel& m, const Ordering& d) {
  const std::size_t n = m.variable_count();
  if (d.order.size() != n) throw ModelError("ordering length differs from variable count");
  const Adjacency initial = primal_graph(m);
  std::vector<std::set<VarId>> adj(n);
  for (std::size_t v = 0; v < n; ++v) adj[v].insert(initial[v].begin(), initial[v].end());
  std::size_t width = 0;
  for (std::size_t p = n; p-- > 0;) {
    const VarId x = d.order[p];
    width = std::max(width, adj[x].size());
    const std::vector<VarId> nbrs(adj[x].begin(), adj[x].end());
    for (VarId a : nbrs) {
      adj[a].erase(x);
      for (VarId b : nbrs)
        if (a != b) adj[a].insert(b);
    }
    adj[x].clear();
  }
  return width;
}

SolverResult bucket_elimination(const GraphicalModel& m, const Ordering& d, const EliminationOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  m.validate();
  const std::size_t n = m.variable_count();
  Ordering::user(d.order, n);  // validates the permutation
  const auto pos = d.positions();
  const CombineOp cop = combine_op(m.task);
  const ProjectOp pop = project_op(m.task);
  const bool drop = m.task == Task::wcsp && options.drop_infinity;

  SolverResult result;
  result.stats.induced_width = induced_width(m, d);
  DeterminizeStats det;

  auto finish = [&](SolveStatus status) {
    result.status = status;
    if (status == SolveStatus::infeasible) {
      result.optimum = m.task == Task::wcsp ? Value::infinity() : Value(0.0);
      result.assignment.clear();
    }
    result.stats.determinizations = det.calls;
    result.stats.determinization_growth_avg = det.average_growth();
    result.stats.determinization_growth_max = det.growth_max;
    result.stats.wall_time_seconds = std::chrono::duration<double>(Clock::now() - started).count();
    return result;
  };

  auto latest = [&](std::span<const VarId> scope) {
    std::size_t best = 0;
    for (VarId x : scope) best = std::max(best, pos[x]);
    return best;
  };

  // Bucket i collects functions whose latest scope variable sits at position i.
  std::vector<std::vector<DafsaFactor>> buckets(n);
  std::vector<Value> scalars;
  std::size_t stored = 0;
  auto note_peak = [&](std::size_t in_flight) {
    result.stats.peak_logical_size = std::max(result.stats.peak_logical_size, stored + in_flight);
  };
  auto store_scalar = [&](const DafsaFactor& f) {
    if (f.entry_count() == 0) return false;
    scalars.push_back(f.entries().front().value);
    return true;
  };

  for (const TabularFactor& t : m.factors) {
    options.deadline.check();
    DafsaFactor f = from_table(t, options.epsilon, drop);
    stored += f.total_states();
    if (f.is_scalar()) {
      if (!store_scalar(f)) return finish(SolveStatus::infeasible);
    } else {
      buckets[latest(f.scope())].push_back(std::move(f));
    }
  }
  note_peak(0);

  for (std::size_t p = n; p-- > 0;) {
    options.deadline.check();
    auto& bucket = buckets[p];
    if (bucket.empty()) continue;
    ++result.stats.buckets_processed;
    DafsaFactor combined = bucket.front();
    for (std::size_t i = 1; i < bucket.size(); ++i) {
      combined = combine(combined, bucket[i], cop, options.epsilon, options.deadline);
      note_peak(combined.total_states());
    }
    result.stats.max_entry_count = std::max(result.stats.max_entry_count, combined.entry_count());
    result.stats.max_automaton_states = std::max(result.stats.max_automaton_states, combined.total_states());

    DafsaFactor message = project(combined, d.order[p], pop, &det, options.deadline);
    note_peak(combined.total_states() + message.total_states());
    if (message.entry_count() == 0) return finish(SolveStatus::infeasible);
    stored += message.total_states();
    if (message.is_scalar()) {
      store_scalar(message);
    } else {
      buckets[latest(message.scope())].push_back(std::move(message));
    }
  }

  Value optimum = identity_value(cop);
  for (Value v : scalars) optimum = combine_values(optimum, v, cop);
  result.optimum = optimum;
  if (optimum.is_infinite()) return finish(SolveStatus::infeasible);

  // Forward pass: pick each variable's best value given earlier choices.
  result.assignment.assign(n, 0);
  std::vector<std::uint32_t> local;
  for (std::size_t p = 0; p < n; ++p) {
    const VarId x = d.order[p];
    std::optional<Value> best;
    std::uint32_t best_value = 0;
    for (std::uint32_t v = 0; v < m.domains[x] && !buckets[p].empty(); ++v) {
      result.assignment[x] = v;
      std::optional<Value> total = identity_value(cop);
      for (const DafsaFactor& f : buckets[p]) {
        local.clear();
        for (VarId y : f.scope()) local.push_back(result.assignment[y]);
        auto val = f.value_at(local);
        if (!val) {
          total.reset();
          break;
        }
        total = combine_values(*total, *val, cop);
      }
      if (total && (!best || better(*total, *best, pop))) {
        best = total;
        best_value = v;
      }
    }
    result.assignment[x] = best_value;
  }
  return finish(SolveStatus::optimal);
}

}  // namespace dbe
