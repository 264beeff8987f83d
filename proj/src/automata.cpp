#include "dbe/automata.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace dbe {

namespace {

constexpr StateId kNone = std::numeric_limits<StateId>::max();
constexpr std::int32_t kDead = -1;

// Mutable adjacency-list automaton used while building results.
struct RawGraph {
  std::vector<std::uint32_t> domains;
  std::vector<std::vector<Transition>> edges;
  std::vector<char> accepting;
  StateId start = 0;

  StateId add_state() {
    edges.emplace_back();
    accepting.push_back(0);
    return static_cast<StateId>(edges.size() - 1);
  }
};

void append_u32(std::string& out, std::uint32_t x) {
  char buf[sizeof x];
  std::memcpy(buf, &x, sizeof x);
  out.append(buf, sizeof x);
}

// Distance from `start` for every reachable state, kDead otherwise. Throws if
// some state is reachable at two different depths.
template <typename EdgesOf>
std::vector<std::int32_t> bfs_levels(std::size_t n, StateId start, EdgesOf edges_of) {
  std::vector<std::int32_t> level(n, kDead);
  if (n == 0) return level;
  std::deque<StateId> queue{start};
  level[start] = 0;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (const Transition& t : edges_of(s)) {
      if (t.target >= n) throw AutomatonError("transition target out of range");
      if (level[t.target] == kDead) {
        level[t.target] = level[s] + 1;
        queue.push_back(t.target);
      } else if (level[t.target] != level[s] + 1) {
        throw AutomatonError("automaton is not leveled");
      }
    }
  }
  return level;
}

std::vector<std::int32_t> bfs_levels(const RawGraph& g) {
  return bfs_levels(g.edges.size(), g.start,
                    [&](StateId s) -> const std::vector<Transition>& { return g.edges[s]; });
}

std::vector<std::int32_t> bfs_levels(const Dafsa& a) {
  return bfs_levels(a.state_count(), a.start(), [&](StateId s) { return a.transitions(s); });
}

// Target reached from an edge list by literal `v`, or kNone.
StateId step(std::span<const Transition> edges, std::uint32_t v) {
  if (edges.size() == 1 && edges.front().symbol.is_wildcard()) return edges.front().target;
  auto it = std::lower_bound(edges.begin(), edges.end(), Symbol::literal(v),
                             [](const Transition& t, Symbol s) { return t.symbol < s; });
  if (it != edges.end() && it->symbol == Symbol::literal(v)) return it->target;
  return kNone;
}

bool is_wildcard_state(std::span<const Transition> edges) {
  return edges.size() == 1 && edges.front().symbol.is_wildcard();
}

}  // namespace

// Packs raw graphs into the compressed representation.
class DafsaAssembler {
 public:
  // Breadth-first renumbering from the start state; unreachable states are
  // dropped. Edge lists must already be sorted by symbol.
  static Dafsa pack_canonical(const RawGraph& g) {
    Dafsa out;
    out.domains_ = g.domains;
    out.offsets_.assign(1, 0);
    out.accepting_.clear();
    std::vector<StateId> renum(g.edges.size(), kNone);
    std::vector<StateId> order;
    order.reserve(g.edges.size());
    renum[g.start] = 0;
    order.push_back(g.start);
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (const Transition& t : g.edges[order[i]]) {
        if (renum[t.target] == kNone) {
          renum[t.target] = static_cast<StateId>(order.size());
          order.push_back(t.target);
        }
      }
    }
    out.accepting_.reserve(order.size());
    out.offsets_.reserve(order.size() + 1);
    for (StateId old : order) {
      for (const Transition& t : g.edges[old]) out.edges_.push_back({t.symbol, renum[t.target]});
      out.offsets_.push_back(static_cast<std::uint32_t>(out.edges_.size()));
      out.accepting_.push_back(g.accepting[old]);
    }
    out.start_ = 0;
    return out;
  }

  static Dafsa pack_verbatim(std::vector<std::uint32_t> domains,
                             std::vector<std::vector<Transition>> edges, StateId start,
                             std::vector<char> accepting) {
    Dafsa out;
    out.domains_ = std::move(domains);
    out.offsets_.assign(1, 0);
    for (auto& list : edges) {
      out.edges_.insert(out.edges_.end(), list.begin(), list.end());
      out.offsets_.push_back(static_cast<std::uint32_t>(out.edges_.size()));
    }
    out.accepting_ = std::move(accepting);
    out.start_ = start;
    return out;
  }

  static RawGraph unpack(const Dafsa& a) {
    RawGraph g;
    g.domains = a.domains_;
    g.start = a.start_;
    g.accepting = a.accepting_;
    g.edges.resize(a.state_count());
    for (StateId s = 0; s < a.state_count(); ++s) {
      auto span = a.transitions(s);
      g.edges[s].assign(span.begin(), span.end());
    }
    return g;
  }
};

namespace {

// Bottom-up merging of states with equal right languages. Dead and
// unreachable states disappear; complete literal fans to one class become a
// wildcard so that the result is canonical per language.
Dafsa minimize_graph(const RawGraph& g) {
  const std::size_t levels = g.domains.size();
  if (g.edges.empty()) return Dafsa::empty(g.domains);
  const auto level = bfs_levels(g);

  std::vector<std::vector<StateId>> by_level(levels + 1);
  for (StateId s = 0; s < g.edges.size(); ++s) {
    if (level[s] == kDead) continue;
    if (static_cast<std::size_t>(level[s]) > levels) throw AutomatonError("path longer than level count");
    by_level[level[s]].push_back(s);
  }

  RawGraph classes;
  classes.domains = g.domains;
  std::unordered_map<std::string, StateId> registry;
  std::vector<std::int32_t> class_of(g.edges.size(), kDead);
  std::vector<Transition> sig;
  std::string key;

  for (std::size_t l = levels + 1; l-- > 0;) {
    for (StateId s : by_level[l]) {
      sig.clear();
      if (l == levels) {
        if (!g.edges[s].empty()) throw AutomatonError("path longer than level count");
        if (!g.accepting[s]) continue;
      } else {
        if (g.accepting[s]) throw AutomatonError("accepting state before the last level");
        for (const Transition& t : g.edges[s]) {
          std::int32_t c = class_of[t.target];
          if (c != kDead) sig.push_back({t.symbol, static_cast<StateId>(c)});
        }
        if (sig.empty()) continue;
        if (sig.back().symbol.is_wildcard()) {
          if (sig.size() != 1) throw AutomatonError("wildcard mixed with literal edges");
        } else if (sig.size() == g.domains[l] &&
                   std::all_of(sig.begin(), sig.end(),
                               [&](const Transition& t) { return t.target == sig.front().target; })) {
          sig = {{Symbol::wildcard(), sig.front().target}};
        }
      }
      key.clear();
      key.push_back(l == levels ? 'F' : 'N');
      for (const Transition& t : sig) {
        append_u32(key, t.symbol.index());
        append_u32(key, t.target);
      }
      auto [it, inserted] = registry.try_emplace(key, 0);
      if (inserted) {
        it->second = classes.add_state();
        classes.edges[it->second] = sig;
        classes.accepting[it->second] = l == levels ? 1 : 0;
      }
      class_of[s] = static_cast<std::int32_t>(it->second);
    }
  }
  if (class_of[g.start] == kDead) return Dafsa::empty(g.domains);
  classes.start = static_cast<StateId>(class_of[g.start]);
  return DafsaAssembler::pack_canonical(classes);
}

void check_same_levels(const Dafsa& a, const Dafsa& b) {
  if (!std::ranges::equal(a.level_domains(), b.level_domains()))
    throw AutomatonError("level count or level domains differ");
}

enum class ProductMode { intersect, unite, difference };

Dafsa product(const Dafsa& a, const Dafsa& b, ProductMode mode) {
  check_same_levels(a, b);
  const auto domains = a.level_domains();
  const std::size_t levels = domains.size();

  auto alive = [mode](StateId p, StateId q) {
    switch (mode) {
      case ProductMode::intersect: return p != kNone && q != kNone;
      case ProductMode::unite: return p != kNone || q != kNone;
      case ProductMode::difference: return p != kNone;
    }
    return false;
  };
  auto accept = [&](StateId p, StateId q) {
    bool x = p != kNone && a.is_accepting(p);
    bool y = q != kNone && b.is_accepting(q);
    switch (mode) {
      case ProductMode::intersect: return x && y;
      case ProductMode::unite: return x || y;
      case ProductMode::difference: return x && !y;
    }
    return false;
  };
  auto edges_of = [](const Dafsa& d, StateId s) -> std::span<const Transition> {
    if (s == kNone) return {};
    return d.transitions(s);
  };

  RawGraph g;
  g.domains.assign(domains.begin(), domains.end());
  std::unordered_map<std::uint64_t, StateId> index;
  std::vector<std::pair<StateId, StateId>> pairs;
  std::vector<std::uint32_t> depth;
  auto intern = [&](StateId p, StateId q, std::uint32_t d) {
    std::uint64_t k = (static_cast<std::uint64_t>(p) << 32) | q;
    auto [it, inserted] = index.try_emplace(k, 0);
    if (inserted) {
      it->second = g.add_state();
      pairs.emplace_back(p, q);
      depth.push_back(d);
    }
    return it->second;
  };

  if (!alive(a.start(), b.start())) return Dafsa::empty(g.domains);
  g.start = intern(a.start(), b.start(), 0);
  std::vector<std::uint32_t> symbols;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [p, q] = pairs[i];
    const std::uint32_t l = depth[i];
    if (l == levels) {
      g.accepting[i] = accept(p, q) ? 1 : 0;
      continue;
    }
    auto ea = edges_of(a, p);
    auto eb = edges_of(b, q);
    const bool wa = is_wildcard_state(ea);
    const bool wb = is_wildcard_state(eb);
    const bool la = !ea.empty() && !wa;
    const bool lb = !eb.empty() && !wb;
    std::vector<Transition> out;
    if (!la && !lb) {
      StateId ta = wa ? ea.front().target : kNone;
      StateId tb = wb ? eb.front().target : kNone;
      if (alive(ta, tb)) out.push_back({Symbol::wildcard(), intern(ta, tb, l + 1)});
    } else {
      symbols.clear();
      auto literals_of = [&](std::span<const Transition> e) {
        for (const Transition& t : e) symbols.push_back(t.symbol.index());
      };
      auto all_values = [&] {
        for (std::uint32_t v = 0; v < domains[l]; ++v) symbols.push_back(v);
      };
      switch (mode) {
        case ProductMode::intersect:
          literals_of(la ? ea : eb);
          break;
        case ProductMode::difference:
          if (wa) all_values();
          else literals_of(ea);
          break;
        case ProductMode::unite:
          if (wa || wb) {
            all_values();
          } else {
            literals_of(ea);
            literals_of(eb);
            std::sort(symbols.begin(), symbols.end());
            symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
          }
          break;
      }
      for (std::uint32_t v : symbols) {
        StateId ta = step(ea, v);
        StateId tb = step(eb, v);
        if (alive(ta, tb)) out.push_back({Symbol::literal(v), intern(ta, tb, l + 1)});
      }
    }
    g.edges[i] = std::move(out);
  }
  return minimize_graph(g);
}

}  // namespace

Dafsa::Dafsa() : offsets_{0, 0}, accepting_{0} {}

Dafsa Dafsa::empty(std::vector<std::uint32_t> level_domains) {
  Dafsa a;
  a.domains_ = std::move(level_domains);
  return a;
}

Dafsa Dafsa::universal(std::vector<std::uint32_t> level_domains) {
  RawGraph g;
  g.domains = std::move(level_domains);
  for (std::size_t l = 0; l <= g.domains.size(); ++l) g.add_state();
  for (std::size_t l = 0; l < g.domains.size(); ++l)
    g.edges[l].push_back({Symbol::wildcard(), static_cast<StateId>(l + 1)});
  g.accepting.back() = 1;
  return DafsaAssembler::pack_canonical(g);
}

Dafsa Dafsa::from_parts(std::vector<std::uint32_t> level_domains,
                        std::vector<std::vector<Transition>> edges, StateId start,
                        const std::vector<StateId>& accepting) {
  if (edges.empty()) throw AutomatonError("automaton needs at least one state");
  if (start >= edges.size()) throw AutomatonError("start state out of range");
  std::vector<char> acc(edges.size(), 0);
  for (StateId s : accepting) {
    if (s >= edges.size()) throw AutomatonError("accepting state out of range");
    acc[s] = 1;
  }
  Dafsa a = DafsaAssembler::pack_verbatim(std::move(level_domains), std::move(edges), start, std::move(acc));
  if (std::string why = check_invariants(a); !why.empty()) throw AutomatonError(why);
  return a;
}

bool Dafsa::empty_language() const {
  std::vector<char> seen(state_count(), 0);
  std::vector<StateId> stack{start_};
  seen[start_] = 1;
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    if (accepting_[s]) return false;
    for (const Transition& t : transitions(s)) {
      if (!seen[t.target]) {
        seen[t.target] = 1;
        stack.push_back(t.target);
      }
    }
  }
  return true;
}

void DeterminizeStats::merge(const DeterminizeStats& other) {
  calls += other.calls;
  nfa_states += other.nfa_states;
  subset_states += other.subset_states;
  growth_sum += other.growth_sum;
  growth_max = std::max(growth_max, other.growth_max);
}

DafsaBuilder::DafsaBuilder(std::vector<std::uint32_t> level_domains)
    : domains_(std::move(level_domains)), nodes_(1), path_{0} {}

void DafsaBuilder::replace_or_register(std::size_t down_to) {
  std::string key;
  for (std::size_t i = path_.size() - 1; i > down_to; --i) {
    const StateId child = path_[i];
    const Node& node = nodes_[child];
    key.clear();
    key.push_back(node.accepting ? 'F' : 'N');
    for (const Transition& t : node.edges) {
      append_u32(key, t.symbol.index());
      append_u32(key, t.target);
    }
    auto [it, inserted] = registry_.try_emplace(key, child);
    if (!inserted) nodes_[path_[i - 1]].edges.back().target = it->second;
  }
  path_.resize(down_to + 1);
}

void DafsaBuilder::add(std::span<const std::uint32_t> word) {
  if (word.size() != domains_.size()) throw AutomatonError("word length does not match level count");
  for (std::size_t i = 0; i < word.size(); ++i)
    if (word[i] >= domains_[i]) throw AutomatonError("literal outside its level domain");

  std::size_t prefix = 0;
  if (words_ > 0) {
    if (!std::lexicographical_compare(previous_.begin(), previous_.end(), word.begin(), word.end()))
      throw AutomatonError("words must be sorted and duplicate-free");
    while (prefix < word.size() && previous_[prefix] == word[prefix]) ++prefix;
  }
  replace_or_register(prefix);
  for (std::size_t i = prefix; i < word.size(); ++i) {
    StateId fresh = static_cast<StateId>(nodes_.size());
    nodes_.emplace_back();
    nodes_[path_.back()].edges.push_back({Symbol::literal(word[i]), fresh});
    path_.push_back(fresh);
  }
  nodes_[path_.back()].accepting = true;
  previous_.assign(word.begin(), word.end());
  ++words_;
}

Dafsa DafsaBuilder::finish() {
  replace_or_register(0);
  if (words_ == 0) return Dafsa::empty(domains_);

  RawGraph g;
  g.domains = domains_;
  g.start = 0;
  g.edges.reserve(nodes_.size());
  for (Node& n : nodes_) {
    g.edges.push_back(std::move(n.edges));
    g.accepting.push_back(n.accepting ? 1 : 0);
  }
  const auto level = bfs_levels(g);
  for (StateId s = 0; s < g.edges.size(); ++s) {
    if (level[s] == kDead || static_cast<std::size_t>(level[s]) >= domains_.size()) continue;
    auto& e = g.edges[s];
    if (e.size() == domains_[level[s]] &&
        std::all_of(e.begin(), e.end(), [&](const Transition& t) { return t.target == e.front().target; }))
      e = {{Symbol::wildcard(), e.front().target}};
  }
  nodes_.assign(1, Node{});
  path_.assign(1, 0);
  registry_.clear();
  words_ = 0;
  return DafsaAssembler::pack_canonical(g);
}

Dafsa compile(std::span<const Word> words, std::vector<std::uint32_t> level_domains) {
  DafsaBuilder builder(std::move(level_domains));
  for (const Word& w : words) builder.add(w);
  return builder.finish();
}

Dafsa minimize(const Dafsa& a) { return minimize_graph(DafsaAssembler::unpack(a)); }

Dafsa intersect(const Dafsa& a, const Dafsa& b) { return product(a, b, ProductMode::intersect); }
Dafsa unite(const Dafsa& a, const Dafsa& b) { return product(a, b, ProductMode::unite); }
Dafsa difference(const Dafsa& a, const Dafsa& b) { return product(a, b, ProductMode::difference); }

Dafsa determinize(const LeveledNfa& n, DeterminizeStats* stats) {
  const std::size_t levels = n.level_domains.size();
  if (n.edges.empty()) return Dafsa::empty(n.level_domains);
  if (n.accepting.size() != n.edges.size()) throw AutomatonError("acceptance vector size mismatch");
  if (n.start >= n.edges.size()) throw AutomatonError("start state out of range");

  std::size_t reachable = 0;
  {
    std::vector<char> seen(n.edges.size(), 0);
    std::vector<StateId> stack{n.start};
    seen[n.start] = 1;
    while (!stack.empty()) {
      StateId s = stack.back();
      stack.pop_back();
      ++reachable;
      for (const Transition& t : n.edges[s]) {
        if (t.target >= n.edges.size()) throw AutomatonError("transition target out of range");
        if (!seen[t.target]) {
          seen[t.target] = 1;
          stack.push_back(t.target);
        }
      }
    }
  }

  RawGraph g;
  g.domains = n.level_domains;
  std::unordered_map<std::string, StateId> index;
  std::vector<std::vector<StateId>> subsets;
  std::vector<std::uint32_t> depth;
  std::string key;
  auto intern = [&](std::vector<StateId>&& set, std::uint32_t d) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    key.clear();
    for (StateId s : set) append_u32(key, s);
    auto [it, inserted] = index.try_emplace(key, 0);
    if (inserted) {
      it->second = g.add_state();
      subsets.push_back(std::move(set));
      depth.push_back(d);
    }
    return it->second;
  };

  g.start = intern({n.start}, 0);
  std::vector<StateId> wild;
  std::vector<std::pair<std::uint32_t, StateId>> lits;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    const std::uint32_t l = depth[i];
    if (l == levels) {
      bool acc = std::any_of(subsets[i].begin(), subsets[i].end(), [&](StateId s) { return n.accepting[s] != 0; });
      g.accepting[i] = acc ? 1 : 0;
      continue;
    }
    wild.clear();
    lits.clear();
    for (StateId s : subsets[i]) {
      for (const Transition& t : n.edges[s]) {
        if (t.symbol.is_wildcard()) {
          wild.push_back(t.target);
        } else {
          if (t.symbol.index() >= n.level_domains[l]) throw AutomatonError("literal outside its level domain");
          lits.emplace_back(t.symbol.index(), t.target);
        }
      }
    }
    std::vector<Transition> out;
    if (lits.empty()) {
      if (!wild.empty()) out.push_back({Symbol::wildcard(), intern(std::vector<StateId>(wild), l + 1)});
    } else {
      std::sort(lits.begin(), lits.end());
      auto it = lits.begin();
      for (std::uint32_t v = 0; v < n.level_domains[l]; ++v) {
        if (wild.empty() && it == lits.end()) break;
        std::vector<StateId> targets(wild);
        for (; it != lits.end() && it->first == v; ++it) targets.push_back(it->second);
        if (!targets.empty()) out.push_back({Symbol::literal(v), intern(std::move(targets), l + 1)});
      }
    }
    g.edges[i] = std::move(out);
  }

  if (stats != nullptr) {
    const double growth = static_cast<double>(subsets.size()) / static_cast<double>(reachable) - 1.0;
    ++stats->calls;
    stats->nfa_states += reachable;
    stats->subset_states += subsets.size();
    stats->growth_sum += growth;
    stats->growth_max = std::max(stats->growth_max, growth);
  }
  return minimize_graph(g);
}

Dafsa remove_level(const Dafsa& a, std::size_t level, DeterminizeStats* stats) {
  const std::size_t levels = a.level_count();
  if (level >= levels) throw AutomatonError("level to remove is out of range");
  const auto depth = bfs_levels(a);

  LeveledNfa n;
  n.level_domains.assign(a.level_domains().begin(), a.level_domains().end());
  n.level_domains.erase(n.level_domains.begin() + static_cast<std::ptrdiff_t>(level));
  n.start = a.start();
  n.edges.resize(a.state_count());
  n.accepting.assign(a.state_count(), 0);
  for (StateId s = 0; s < a.state_count(); ++s) {
    if (depth[s] == kDead) continue;
    if (static_cast<std::size_t>(depth[s]) == level) {
      for (const Transition& t : a.transitions(s)) {
        auto next = a.transitions(t.target);
        n.edges[s].insert(n.edges[s].end(), next.begin(), next.end());
        if (a.is_accepting(t.target)) n.accepting[s] = 1;
      }
    } else {
      auto e = a.transitions(s);
      n.edges[s].assign(e.begin(), e.end());
      n.accepting[s] = a.is_accepting(s) ? 1 : 0;
    }
  }
  return determinize(n, stats);
}

Dafsa insert_wildcard_levels(const Dafsa& a, std::vector<std::uint32_t> new_domains,
                             std::span<const std::size_t> old_positions) {
  const std::size_t old_levels = a.level_count();
  const std::size_t new_levels = new_domains.size();
  if (old_positions.size() != old_levels) throw AutomatonError("one position per existing level required");
  for (std::size_t i = 0; i < old_levels; ++i) {
    if (old_positions[i] >= new_levels || (i > 0 && old_positions[i] <= old_positions[i - 1]))
      throw AutomatonError("level positions must be increasing and in range");
    if (new_domains[old_positions[i]] != a.level_domains()[i])
      throw AutomatonError("domain mismatch for a kept level");
  }
  if (old_levels == new_levels) return a;

  auto gap_before = [&](std::size_t l) -> std::size_t {
    std::size_t first_free = l == 0 ? 0 : old_positions[l - 1] + 1;
    std::size_t next = l == old_levels ? new_levels : old_positions[l];
    return next - first_free;
  };

  const auto depth = bfs_levels(a);
  RawGraph g;
  g.domains = std::move(new_domains);
  std::vector<StateId> head(a.state_count(), kNone);
  std::vector<StateId> core(a.state_count(), kNone);
  for (StateId s = 0; s < a.state_count(); ++s) {
    if (depth[s] == kDead) continue;
    const std::size_t gap = gap_before(static_cast<std::size_t>(depth[s]));
    head[s] = g.add_state();
    StateId prev = head[s];
    for (std::size_t j = 0; j < gap; ++j) {
      StateId next = g.add_state();
      g.edges[prev].push_back({Symbol::wildcard(), next});
      prev = next;
    }
    core[s] = prev;
  }
  for (StateId s = 0; s < a.state_count(); ++s) {
    if (depth[s] == kDead) continue;
    for (const Transition& t : a.transitions(s)) g.edges[core[s]].push_back({t.symbol, head[t.target]});
    g.accepting[core[s]] = a.is_accepting(s) ? 1 : 0;
  }
  g.start = head[a.start()];
  return minimize_graph(g);
}

std::vector<Word> enumerate(const Dafsa& a, std::size_t cap) {
  std::vector<Word> out;
  Word word;
  word.reserve(a.level_count());
  auto visit = [&](auto&& self, StateId s) -> void {
    if (word.size() == a.level_count()) {
      if (a.is_accepting(s)) {
        if (out.size() >= cap) throw AutomatonError("enumeration exceeds cap");
        out.push_back(word);
      }
      return;
    }
    for (const Transition& t : a.transitions(s)) {
      if (t.symbol.is_wildcard()) {
        for (std::uint32_t v = 0; v < a.level_domains()[word.size()]; ++v) {
          word.push_back(v);
          self(self, t.target);
          word.pop_back();
        }
      } else {
        word.push_back(t.symbol.index());
        self(self, t.target);
        word.pop_back();
      }
    }
  };
  visit(visit, a.start());
  return out;
}

std::uint64_t count(const Dafsa& a) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  const auto depth = bfs_levels(a);
  std::vector<StateId> order;
  for (StateId s = 0; s < a.state_count(); ++s)
    if (depth[s] != kDead) order.push_back(s);
  std::sort(order.begin(), order.end(), [&](StateId x, StateId y) { return depth[x] > depth[y]; });
  std::vector<std::uint64_t> n(a.state_count(), 0);
  for (StateId s : order) {
    unsigned __int128 total = a.is_accepting(s) ? 1 : 0;
    for (const Transition& t : a.transitions(s)) {
      unsigned __int128 mult = t.symbol.is_wildcard() ? a.level_domains()[depth[s]] : 1;
      total += mult * n[t.target];
      if (total > kMax) total = kMax;
    }
    n[s] = static_cast<std::uint64_t>(total);
  }
  return n[a.start()];
}

bool accepts(const Dafsa& a, std::span<const std::uint32_t> word) {
  if (word.size() != a.level_count()) throw AutomatonError("word length does not match level count");
  StateId s = a.start();
  for (std::uint32_t v : word) {
    s = step(a.transitions(s), v);
    if (s == kNone) return false;
  }
  return a.is_accepting(s);
}

std::string check_invariants(const Dafsa& a) {
  const std::size_t n = a.state_count();
  if (a.start() >= n) return "start state out of range";
  for (StateId s = 0; s < n; ++s) {
    auto e = a.transitions(s);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i].target >= n) return "transition target out of range";
      if (i > 0 && !(e[i - 1].symbol < e[i].symbol)) return "edges not strictly sorted by symbol";
      if (e[i].symbol.is_wildcard() && e.size() != 1) return "wildcard mixed with literal edges";
    }
  }
  std::vector<std::int32_t> depth;
  try {
    depth = bfs_levels(a);
  } catch (const AutomatonError& e) {
    return e.what();
  }
  for (StateId s = 0; s < n; ++s) {
    if (depth[s] == kDead) return "unreachable state " + std::to_string(s);
    const auto l = static_cast<std::size_t>(depth[s]);
    if (l > a.level_count()) return "path longer than level count";
    if (a.is_accepting(s) && l != a.level_count()) return "accepting state before the last level";
    for (const Transition& t : a.transitions(s)) {
      if (l == a.level_count()) return "edge leaves the last level";
      if (!t.symbol.is_wildcard() && t.symbol.index() >= a.level_domains()[l])
        return "literal outside its level domain";
    }
  }
  return {};
}

bool is_minimal(const Dafsa& a) { return minimize(a).state_count() == a.state_count(); }

std::string to_text(const Dafsa& a) {
  std::ostringstream out;
  out << "levels " << a.level_count() << " domains";
  for (std::uint32_t d : a.level_domains()) out << ' ' << d;
  out << "\nstates " << a.state_count() << " start " << a.start() << "\nfinal";
  for (StateId s = 0; s < a.state_count(); ++s)
    if (a.is_accepting(s)) out << ' ' << s;
  out << '\n';
  const auto depth = bfs_levels(a);
  for (StateId s = 0; s < a.state_count(); ++s) {
    for (const Transition& t : a.transitions(s)) {
      out << depth[s] << ' ' << s << ' ';
      if (t.symbol.is_wildcard()) out << '*';
      else out << t.symbol.index();
      out << ' ' << t.target << '\n';
    }
  }
  return out.str();
}

Dafsa from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string tag;
  std::size_t levels = 0;
  if (!(in >> tag >> levels) || tag != "levels") throw AutomatonError("expected 'levels'");
  if (!(in >> tag) || tag != "domains") throw AutomatonError("expected 'domains'");
  std::vector<std::uint32_t> domains(levels);
  for (auto& d : domains)
    if (!(in >> d)) throw AutomatonError("bad domain list");
  std::size_t states = 0;
  StateId start = 0;
  if (!(in >> tag >> states) || tag != "states") throw AutomatonError("expected 'states'");
  if (!(in >> tag >> start) || tag != "start") throw AutomatonError("expected 'start'");
  if (!(in >> tag) || tag != "final") throw AutomatonError("expected 'final'");
  std::string line;
  std::getline(in, line);
  std::vector<StateId> finals;
  {
    std::istringstream ls(line);
    StateId f;
    while (ls >> f) finals.push_back(f);
  }
  std::vector<std::vector<Transition>> edges(states);
  std::size_t level = 0;
  StateId src = 0, dst = 0;
  std::string sym;
  while (in >> level >> src >> sym >> dst) {
    if (src >= states) throw AutomatonError("source state out of range");
    Symbol s = sym == "*" ? Symbol::wildcard() : Symbol::literal(static_cast<std::uint32_t>(std::stoul(sym)));
    edges[src].push_back({s, dst});
  }
  if (!in.eof()) throw AutomatonError("malformed transition line");
  return Dafsa::from_parts(std::move(domains), std::move(edges), start, finals);
}

}  // namespace dbe
