#pragma once

// Test-only helpers: random inputs and set/table oracles that do not go
// through the automaton code paths.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "dbe/automata.hpp"
#include "dbe/factor.hpp"
#include "dbe/model.hpp"

namespace dbe::test {

using WordSet = std::set<Word>;

// Every word over the given domains, in lexicographic order.
inline std::vector<Word> all_words(const std::vector<std::uint32_t>& domains) {
  std::vector<Word> out;
  Word w(domains.size(), 0);
  for (std::uint32_t d : domains)
    if (d == 0) return out;
  while (true) {
    out.push_back(w);
    std::size_t i = w.size();
    while (i > 0) {
      --i;
      if (++w[i] < domains[i]) break;
      w[i] = 0;
      if (i == 0) return out;
    }
    if (w.empty()) return out;
  }
}

inline std::vector<std::uint32_t> random_domains(std::mt19937_64& rng, std::size_t max_levels, std::uint32_t max_k) {
  std::uniform_int_distribution<std::size_t> levels(0, max_levels);
  std::uniform_int_distribution<std::uint32_t> k(1, max_k);
  std::vector<std::uint32_t> d(levels(rng));
  for (auto& x : d) x = k(rng);
  return d;
}

inline WordSet random_words(std::mt19937_64& rng, const std::vector<std::uint32_t>& domains) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double density = unit(rng);
  WordSet s;
  for (Word& w : all_words(domains))
    if (unit(rng) < density) s.insert(std::move(w));
  return s;
}

inline Dafsa compile_set(const WordSet& s, const std::vector<std::uint32_t>& domains) {
  std::vector<Word> words(s.begin(), s.end());
  return compile(words, domains);
}

inline WordSet as_set(const std::vector<Word>& words) { return WordSet(words.begin(), words.end()); }

inline WordSet set_op(const WordSet& a, const WordSet& b, char op) {
  WordSet out;
  if (op == '&') std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  if (op == '|') std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  if (op == '-') std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

// Random table drawing values from a small palette; infinity cells optional.
inline TabularFactor random_table(std::mt19937_64& rng, std::vector<VarId> scope, std::vector<std::uint32_t> domains,
                                  bool integer_costs, double infinity_rate) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> colors(1, 4);
  std::vector<Value> palette;
  for (int c = colors(rng); c > 0; --c)
    palette.emplace_back(integer_costs ? std::floor(unit(rng) * 6.0) : 0.3 + 0.7 * unit(rng));
  std::uniform_int_distribution<std::size_t> pick(0, palette.size() - 1);
  std::vector<Value> values(table_size(domains));
  for (Value& v : values) v = unit(rng) < infinity_rate ? Value::infinity() : palette[pick(rng)];
  return TabularFactor::make(std::move(scope), std::move(domains), std::move(values));
}

// Sorted scope of `count` distinct variables below `n`.
inline std::vector<VarId> random_scope(std::mt19937_64& rng, std::size_t n, std::size_t count) {
  std::vector<VarId> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<VarId>(i);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(count, n));
  std::sort(pool.begin(), pool.end());
  return pool;
}

// Dense pointwise combination over the union scope, computed directly.
inline TabularFactor table_combine(const TabularFactor& a, const TabularFactor& b, CombineOp op) {
  std::map<VarId, std::uint32_t> dom;
  for (std::size_t i = 0; i < a.scope.size(); ++i) dom[a.scope[i]] = a.domains[i];
  for (std::size_t i = 0; i < b.scope.size(); ++i) dom[b.scope[i]] = b.domains[i];
  std::vector<VarId> scope;
  std::vector<std::uint32_t> domains;
  for (auto [x, k] : dom) {
    scope.push_back(x);
    domains.push_back(k);
  }
  std::vector<Value> values;
  for (const Word& w : all_words(domains)) {
    std::map<VarId, std::uint32_t> asg;
    for (std::size_t i = 0; i < scope.size(); ++i) asg[scope[i]] = w[i];
    Word la, lb;
    for (VarId x : a.scope) la.push_back(asg[x]);
    for (VarId x : b.scope) lb.push_back(asg[x]);
    values.push_back(combine_values(a.at(la), b.at(lb), op));
  }
  return TabularFactor::make(scope, domains, values);
}

// Dense projection: optimum over the values of `x`.
inline TabularFactor table_project(const TabularFactor& t, VarId x, ProjectOp op) {
  std::vector<VarId> scope;
  std::vector<std::uint32_t> domains;
  std::size_t at = 0;
  for (std::size_t i = 0; i < t.scope.size(); ++i) {
    if (t.scope[i] == x) {
      at = i;
      continue;
    }
    scope.push_back(t.scope[i]);
    domains.push_back(t.domains[i]);
  }
  std::vector<Value> values;
  for (const Word& w : all_words(domains)) {
    Word full = w;
    full.insert(full.begin() + static_cast<std::ptrdiff_t>(at), 0);
    Value best = t.at(full);
    for (std::uint32_t v = 1; v < t.domains[at]; ++v) {
      full[at] = v;
      if (better(t.at(full), best, op)) best = t.at(full);
    }
    values.push_back(best);
  }
  return TabularFactor::make(scope, domains, values);
}

inline bool close(Value a, Value b, double tol = 1e-9) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
  return std::abs(a.get() - b.get()) <= tol * std::max(1.0, std::max(std::abs(a.get()), std::abs(b.get())));
}

inline bool tables_close(const TabularFactor& a, const TabularFactor& b, double tol = 1e-9) {
  if (a.scope != b.scope || a.domains != b.domains || a.values.size() != b.values.size()) return false;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    if (!close(a.values[i], b.values[i], tol)) return false;
  return true;
}

// Random leveled NFA with overlapping literals and mixed wildcards.
inline LeveledNfa random_nfa(std::mt19937_64& rng, const std::vector<std::uint32_t>& domains) {
  std::uniform_int_distribution<std::size_t> width(1, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LeveledNfa n;
  n.level_domains = domains;
  std::vector<std::vector<StateId>> layer(domains.size() + 1);
  for (std::size_t l = 0; l <= domains.size(); ++l) {
    const std::size_t w = l == 0 ? 1 : width(rng);
    for (std::size_t i = 0; i < w; ++i) {
      layer[l].push_back(static_cast<StateId>(n.edges.size()));
      n.edges.emplace_back();
      n.accepting.push_back(l == domains.size() && unit(rng) < 0.8);
    }
  }
  for (std::size_t l = 0; l < domains.size(); ++l) {
    for (StateId s : layer[l]) {
      for (StateId t : layer[l + 1]) {
        if (unit(rng) < 0.2) n.edges[s].push_back({Symbol::wildcard(), t});
        for (std::uint32_t v = 0; v < domains[l]; ++v)
          if (unit(rng) < 0.3) n.edges[s].push_back({Symbol::literal(v), t});
      }
    }
  }
  return n;
}

inline bool nfa_accepts(const LeveledNfa& n, const Word& w) {
  std::set<StateId> cur{n.start};
  for (std::uint32_t v : w) {
    std::set<StateId> next;
    for (StateId s : cur)
      for (const Transition& t : n.edges[s])
        if (t.symbol.is_wildcard() || t.symbol.index() == v) next.insert(t.target);
    cur = std::move(next);
  }
  for (StateId s : cur)
    if (n.accepting[s]) return true;
  return false;
}

// Depths whose every edge is a wildcard.
inline std::vector<std::size_t> wildcard_levels(const Dafsa& a) {
  std::vector<char> all(a.level_count(), 1), any(a.level_count(), 0);
  std::vector<StateId> frontier{a.start()};
  for (std::size_t l = 0; l < a.level_count(); ++l) {
    std::set<StateId> next;
    for (StateId s : frontier)
      for (const Transition& t : a.transitions(s)) {
        any[l] = 1;
        if (!t.symbol.is_wildcard()) all[l] = 0;
        next.insert(t.target);
      }
    frontier.assign(next.begin(), next.end());
  }
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < a.level_count(); ++l)
    if (all[l] && any[l]) out.push_back(l);
  return out;
}

// Small hand-built table with repeated values and two infinite cells:
// scope ids 0, 1, 3 with v1 = 1, v2 = 2, v3 = 3.
inline TabularFactor example_table() {
  const Value v1(1.0), v2(2.0), v3(3.0), inf = Value::infinity();
  return TabularFactor::make({0, 1, 3}, {2, 2, 2}, {v1, v1, v2, v1, v3, inf, v3, inf});
}

// Its partner over {X3, X4}: v3, v7, v3, v1 with v7 = 7.
inline TabularFactor example_partner() {
  return TabularFactor::make({2, 3}, {2, 2}, {Value(3.0), Value(7.0), Value(3.0), Value(1.0)});
}

}  // namespace dbe::test
