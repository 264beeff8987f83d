#include "dbe/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

namespace dbe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double op_combine(Task task, double a, double b) {
  if (task == Task::map) return a * b;
  if (a == kInf || b == kInf) return kInf;
  return a + b;
}

bool op_better(Task task, double a, double b) { return task == Task::map ? a > b : a < b; }

struct Table {
  std::vector<VarId> scope;
  std::vector<std::uint32_t> dom;
  std::vector<double> vals;
};

std::size_t cells_of(const std::vector<std::uint32_t>& dom, std::size_t limit) {
  std::size_t n = 1;
  for (std::uint32_t d : dom) {
    if (n > limit / d) throw OverBudget("table exceeds the cell budget");
    n *= d;
  }
  return n;
}

// Stride of each variable of `t` inside a table over `scope`.
std::vector<std::size_t> strides_in(const Table& t, const std::vector<VarId>& scope) {
  std::vector<std::size_t> stride(scope.size(), 0);
  std::size_t s = 1;
  for (std::size_t i = t.scope.size(); i-- > 0;) {
    auto it = std::find(scope.begin(), scope.end(), t.scope[i]);
    stride[static_cast<std::size_t>(it - scope.begin())] = s;
    s *= t.dom[i];
  }
  return stride;
}

Table combine_tables(Task task, const Table& a, const Table& b, std::size_t limit) {
  Table out;
  std::set_union(a.scope.begin(), a.scope.end(), b.scope.begin(), b.scope.end(), std::back_inserter(out.scope));
  for (VarId x : out.scope) {
    auto ia = std::find(a.scope.begin(), a.scope.end(), x);
    out.dom.push_back(ia != a.scope.end() ? a.dom[ia - a.scope.begin()]
                                          : b.dom[std::find(b.scope.begin(), b.scope.end(), x) - b.scope.begin()]);
  }
  const std::size_t cells = cells_of(out.dom, limit);
  out.vals.resize(cells);
  const auto sa = strides_in(a, out.scope);
  const auto sb = strides_in(b, out.scope);
  std::vector<std::uint32_t> digit(out.scope.size(), 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    out.vals[c] = op_combine(task, a.vals[ia], b.vals[ib]);
    for (std::size_t i = digit.size(); i-- > 0;) {
      if (++digit[i] < out.dom[i]) {
        ia += sa[i];
        ib += sb[i];
        break;
      }
      ia -= sa[i] * (out.dom[i] - 1);
      ib -= sb[i] * (out.dom[i] - 1);
      digit[i] = 0;
    }
  }
  return out;
}

Table project_table(Task task, const Table& t, VarId x) {
  const auto at = static_cast<std::size_t>(std::find(t.scope.begin(), t.scope.end(), x) - t.scope.begin());
  Table out;
  out.scope = t.scope;
  out.dom = t.dom;
  out.scope.erase(out.scope.begin() + static_cast<std::ptrdiff_t>(at));
  out.dom.erase(out.dom.begin() + static_cast<std::ptrdiff_t>(at));
  std::size_t inner = 1;
  for (std::size_t i = at + 1; i < t.dom.size(); ++i) inner *= t.dom[i];
  const std::size_t k = t.dom[at];
  const std::size_t outer = t.vals.size() / (inner * k);
  out.vals.resize(outer * inner);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      double best = t.vals[o * k * inner + i];
      for (std::size_t v = 1; v < k; ++v) {
        double cand = t.vals[(o * k + v) * inner + i];
        if (op_better(task, cand, best)) best = cand;
      }
      out.vals[o * inner + i] = best;
    }
  }
  return out;
}

double lookup(const Table& t, const std::vector<std::uint32_t>& assignment) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < t.scope.size(); ++i) idx = idx * t.dom[i] + assignment[t.scope[i]];
  return t.vals[idx];
}

}  // namespace

SolverResult brute_force(const GraphicalModel& m, const OracleBudget& budget, const Deadline& deadline) {
  const auto started = std::chrono::steady_clock::now();
  m.validate();
  const std::size_t n = m.variable_count();
  std::size_t total = 1;
  for (std::uint32_t d : m.domains) {
    if (total > budget.max_assignments / d) throw OverBudget("too many assignments for exhaustive search");
    total *= d;
  }

  std::vector<std::uint32_t> x(n, 0), best_x;
  double best = 0.0;
  bool have = false;
  std::vector<std::size_t> idx(m.factors.size());
  for (std::size_t c = 0; c < total; ++c) {
    if ((c & 0xFFFF) == 0) deadline.check();
    double value = m.task == Task::map ? 1.0 : 0.0;
    for (const TabularFactor& f : m.factors) {
      std::size_t row = 0;
      for (std::size_t i = 0; i < f.scope.size(); ++i) row = row * f.domains[i] + x[f.scope[i]];
      value = op_combine(m.task, value, f.values[row].get());
    }
    const bool feasible = !(m.task == Task::wcsp && value == kInf);
    if (feasible && (!have || op_better(m.task, value, best))) {
      best = value;
      best_x = x;
      have = true;
    }
    for (std::size_t i = n; i-- > 0;) {
      if (++x[i] < m.domains[i]) break;
      x[i] = 0;
    }
  }

  SolverResult r;
  if (have) {
    r.status = SolveStatus::optimal;
    r.optimum = Value(best);
    r.assignment = std::move(best_x);
  } else {
    r.status = SolveStatus::infeasible;
    r.optimum = Value::infinity();
  }
  r.stats.peak_logical_size = total;
  r.stats.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

SolverResult tabular_be(const GraphicalModel& m, const Ordering& d, const OracleBudget& budget,
                        const Deadline& deadline) {
  const auto started = std::chrono::steady_clock::now();
  m.validate();
  const std::size_t n = m.variable_count();
  const auto pos = Ordering::user(d.order, n).positions();
  const std::size_t limit = budget.max_table_cells;

  SolverResult r;
  std::vector<std::vector<Table>> buckets(n);
  double scalar = m.task == Task::map ? 1.0 : 0.0;
  std::size_t stored = 0;
  auto note = [&](std::size_t in_flight) {
    const std::size_t live = stored + in_flight;
    if (live > limit) throw OverBudget("live tables exceed the cell budget");
    r.stats.peak_logical_size = std::max(r.stats.peak_logical_size, live);
  };

  for (const TabularFactor& f : m.factors) {
    Table t{f.scope, f.domains, {}};
    for (Value v : f.values) t.vals.push_back(v.get());
    stored += t.vals.size();
    note(0);
    if (t.scope.empty()) {
      scalar = op_combine(m.task, scalar, t.vals.front());
      continue;
    }
    std::size_t p = 0;
    for (VarId x : t.scope) p = std::max(p, pos[x]);
    buckets[p].push_back(std::move(t));
  }

  for (std::size_t p = n; p-- > 0;) {
    deadline.check();
    if (buckets[p].empty()) continue;
    ++r.stats.buckets_processed;
    Table acc = buckets[p].front();
    for (std::size_t i = 1; i < buckets[p].size(); ++i) {
      acc = combine_tables(m.task, acc, buckets[p][i], limit);
      note(acc.vals.size());
      deadline.check();
    }
    r.stats.max_entry_count = std::max(r.stats.max_entry_count, acc.vals.size());
    Table msg = project_table(m.task, acc, d.order[p]);
    note(acc.vals.size() + msg.vals.size());
    stored += msg.vals.size();
    if (msg.scope.empty()) {
      scalar = op_combine(m.task, scalar, msg.vals.front());
      continue;
    }
    std::size_t q = 0;
    for (VarId x : msg.scope) q = std::max(q, pos[x]);
    buckets[q].push_back(std::move(msg));
  }

  auto done = [&] {
    r.stats.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return r;
  };
  if (m.task == Task::wcsp && scalar == kInf) {
    r.status = SolveStatus::infeasible;
    r.optimum = Value::infinity();
    return done();
  }
  r.status = SolveStatus::optimal;
  r.optimum = Value(scalar);
  r.assignment.assign(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    const VarId x = d.order[p];
    if (buckets[p].empty()) continue;
    double best = 0.0;
    std::uint32_t best_v = 0;
    for (std::uint32_t v = 0; v < m.domains[x]; ++v) {
      r.assignment[x] = v;
      double total = m.task == Task::map ? 1.0 : 0.0;
      for (const Table& t : buckets[p]) total = op_combine(m.task, total, lookup(t, r.assignment));
      if (v == 0 || op_better(m.task, total, best)) {
        best = total;
        best_v = v;
      }
    }
    r.assignment[x] = best_v;
  }
  return done();
}

}  // namespace dbe
