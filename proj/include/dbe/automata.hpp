#pragma once

// Leveled deterministic acyclic finite-state automata (DAFSA).
//
// Every accepted string has exactly level_count() symbols and the symbol read
// at depth i is drawn from {0, ..., level_domains()[i] - 1}. A wildcard edge
// stands for every value of its level's domain; a state carries either one
// wildcard edge or only literal edges.
//
// Automata are immutable values. All set operations return minimized automata
// in canonical numbering (breadth-first from the start state, edges visited in
// symbol order), so two automata with the same language compare equal.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dbe {

using StateId = std::uint32_t;
using Word = std::vector<std::uint32_t>;

class Symbol {
 public:
  static constexpr std::uint32_t kWildcardCode = std::numeric_limits<std::uint32_t>::max();

  constexpr Symbol() = default;
  static constexpr Symbol literal(std::uint32_t index) { return Symbol(index); }
  static constexpr Symbol wildcard() { return Symbol(kWildcardCode); }

  constexpr bool is_wildcard() const { return code_ == kWildcardCode; }
  constexpr std::uint32_t index() const { return code_; }

  // Wildcard sorts after every literal.
  constexpr auto operator<=>(const Symbol&) const = default;

 private:
  constexpr explicit Symbol(std::uint32_t code) : code_(code) {}
  std::uint32_t code_ = 0;
};

struct Transition {
  Symbol symbol;
  StateId target = 0;

  constexpr auto operator<=>(const Transition&) const = default;
};

class AutomatonError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Dafsa {
 public:
  // Zero-level automaton with the empty language.
  Dafsa();

  static Dafsa empty(std::vector<std::uint32_t> level_domains);
  static Dafsa universal(std::vector<std::uint32_t> level_domains);

  // Builds an automaton from explicit per-state edge lists. The result is
  // validated (see check_invariants) but neither minimized nor renumbered.
  static Dafsa from_parts(std::vector<std::uint32_t> level_domains,
                          std::vector<std::vector<Transition>> edges, StateId start,
                          const std::vector<StateId>& accepting);

  std::size_t level_count() const { return domains_.size(); }
  std::span<const std::uint32_t> level_domains() const { return domains_; }
  std::size_t state_count() const { return accepting_.size(); }
  std::size_t transition_count() const { return edges_.size(); }
  StateId start() const { return start_; }
  bool is_accepting(StateId s) const { return accepting_[s] != 0; }
  std::span<const Transition> transitions(StateId s) const {
    return {edges_.data() + offsets_[s], edges_.data() + offsets_[s + 1]};
  }

  // True when no string is accepted. Exact for minimized automata; for
  // hand-built ones this walks the reachable graph.
  bool empty_language() const;

  // Structural equality (same numbering, edges, acceptance).
  bool operator==(const Dafsa&) const = default;

 private:
  friend class DafsaAssembler;

  std::vector<std::uint32_t> domains_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Transition> edges_;
  std::vector<char> accepting_;
  StateId start_ = 0;
};

// Incremental construction of a minimal DAFSA from lexicographically sorted,
// duplicate-free words (Daciuk et al., sorted-input variant). Complete
// literal fans that lead to a single successor are folded into wildcards.
class DafsaBuilder {
 public:
  explicit DafsaBuilder(std::vector<std::uint32_t> level_domains);

  void add(std::span<const std::uint32_t> word);
  Dafsa finish();

  std::size_t word_count() const { return words_; }

 private:
  struct Node {
    std::vector<Transition> edges;
    bool accepting = false;
  };

  void replace_or_register(std::size_t down_to);

  std::vector<std::uint32_t> domains_;
  std::vector<Node> nodes_;
  std::vector<StateId> path_;
  Word previous_;
  std::size_t words_ = 0;
  // Right-language signature (acceptance + outgoing edges) -> registered node.
  std::unordered_map<std::string, StateId> registry_;
};

// Leveled automaton that may be nondeterministic: edge symbol sets of one
// state may overlap and wildcards may mix with literals.
struct LeveledNfa {
  std::vector<std::uint32_t> level_domains;
  std::vector<std::vector<Transition>> edges;
  std::vector<char> accepting;
  StateId start = 0;
};

// Counters for subset construction. A call's growth is
// subset_states / nfa_states - 1, where nfa_states counts reachable states.
struct DeterminizeStats {
  std::size_t calls = 0;
  std::size_t nfa_states = 0;
  std::size_t subset_states = 0;
  double growth_sum = 0.0;
  double growth_max = 0.0;

  double average_growth() const { return calls == 0 ? 0.0 : growth_sum / static_cast<double>(calls); }
  void merge(const DeterminizeStats& other);
};

Dafsa compile(std::span<const Word> words, std::vector<std::uint32_t> level_domains);

Dafsa minimize(const Dafsa& a);

Dafsa intersect(const Dafsa& a, const Dafsa& b);
Dafsa unite(const Dafsa& a, const Dafsa& b);
Dafsa difference(const Dafsa& a, const Dafsa& b);

Dafsa determinize(const LeveledNfa& n, DeterminizeStats* stats = nullptr);

// Contracts every edge of the given level and re-determinizes. The result
// accepts the input strings with position `level` deleted.
Dafsa remove_level(const Dafsa& a, std::size_t level, DeterminizeStats* stats = nullptr);

// Inserts wildcard levels. `old_positions[i]` is the new depth of old level i
// (strictly increasing, each < new_domains.size()); domains of kept levels
// must match.
Dafsa insert_wildcard_levels(const Dafsa& a, std::vector<std::uint32_t> new_domains,
                             std::span<const std::size_t> old_positions);

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

// All accepted strings with wildcards expanded, in lexicographic order.
// Throws AutomatonError when more than `cap` strings would be produced.
std::vector<Word> enumerate(const Dafsa& a, std::size_t cap = kDefaultEnumerationCap);

// Number of accepted strings; saturates at UINT64_MAX.
std::uint64_t count(const Dafsa& a);

bool accepts(const Dafsa& a, std::span<const std::uint32_t> word);

// Returns an empty string when the automaton is leveled, acyclic, and
// deterministic with wildcard exclusivity; otherwise a description of the
// first violation found.
std::string check_invariants(const Dafsa& a);

// Number of states of the minimal equivalent automaton equals state_count().
bool is_minimal(const Dafsa& a);

// Text form: a header, then one `level src symbol dst` line per transition
// with `*` for wildcards.
std::string to_text(const Dafsa& a);
Dafsa from_text(std::string_view text);

}  // namespace dbe
