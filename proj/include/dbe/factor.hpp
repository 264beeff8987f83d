#pragma once

// Factor representations.
//
// TabularFactor is the classical dense table. DafsaFactor keys factors by
// value instead: each distinct value (up to epsilon) owns the minimal DAFSA
// accepting exactly the scope assignments mapped to it. Level i of every
// automaton reads the value of scope[i].

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dbe/automata.hpp"
#include "dbe/deadline.hpp"
#include "dbe/value.hpp"

namespace dbe {

using VarId = std::uint32_t;

class FactorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Product of domain sizes; throws FactorError on overflow.
std::size_t table_size(std::span<const std::uint32_t> domains);

struct TabularFactor {
  std::vector<VarId> scope;            // strictly increasing
  std::vector<std::uint32_t> domains;  // one per scope variable
  std::vector<Value> values;           // row-major, last scope variable fastest

  static TabularFactor make(std::vector<VarId> scope, std::vector<std::uint32_t> domains,
                            std::vector<Value> values);
  static TabularFactor constant(std::vector<VarId> scope, std::vector<std::uint32_t> domains, Value v);

  std::size_t size() const { return values.size(); }
  std::size_t index_of(std::span<const std::uint32_t> local) const;
  Value at(std::span<const std::uint32_t> local) const { return values[index_of(local)]; }
  // Decodes a row index into a local assignment.
  void decode(std::size_t row, std::span<std::uint32_t> local) const;

  bool operator==(const TabularFactor&) const = default;
};

struct FactorEntry {
  Value value;
  Dafsa automaton;
};

class DafsaFactor {
 public:
  // Zero-scope factor with no entries (everything pruned).
  DafsaFactor() = default;
  // Entries are sorted by value; every automaton must match the scope's levels.
  DafsaFactor(std::vector<VarId> scope, std::vector<std::uint32_t> domains, std::vector<FactorEntry> entries);

  static DafsaFactor scalar(Value v);

  std::span<const VarId> scope() const { return scope_; }
  std::span<const std::uint32_t> domains() const { return domains_; }
  std::span<const FactorEntry> entries() const { return entries_; }
  std::size_t entry_count() const { return entries_.size(); }
  std::size_t total_states() const;
  bool is_scalar() const { return scope_.empty(); }

  // Value of the entry whose automaton accepts `local`, or nullopt when the
  // assignment is pruned (reads as infinity under min).
  std::optional<Value> value_at(std::span<const std::uint32_t> local) const;

  // Position of `x` in the scope, or nullopt.
  std::optional<std::size_t> level_of(VarId x) const;

 private:
  std::vector<VarId> scope_;
  std::vector<std::uint32_t> domains_;
  std::vector<FactorEntry> entries_;
};

inline constexpr std::size_t kDefaultTableCap = 10'000'000;

// Groups table rows by epsilon-keyed value and compiles one automaton per
// group. With drop_infinity, rows valued infinity are not represented.
DafsaFactor from_table(const TabularFactor& t, double epsilon = kDefaultEpsilon, bool drop_infinity = false);

// Expands back to a dense table; assignments in no entry receive
// `default_value`. Throws FactorError above `cap` cells.
TabularFactor to_table(const DafsaFactor& f, Value default_value, std::size_t cap = kDefaultTableCap);

// Extends both factors to the union of their scopes by inserting wildcard
// levels. Throws FactorError if a shared variable has different domains.
std::pair<DafsaFactor, DafsaFactor> add_levels(const DafsaFactor& f1, const DafsaFactor& f2);

// Drops `x` from the scope and contracts its level in every entry. Entry
// languages may overlap afterwards.
DafsaFactor remove_level(const DafsaFactor& f, VarId x, DeterminizeStats* stats = nullptr);

DafsaFactor combine(const DafsaFactor& f1, const DafsaFactor& f2, CombineOp op,
                    double epsilon = kDefaultEpsilon, const Deadline& deadline = {});

DafsaFactor project(const DafsaFactor& f, VarId x, ProjectOp op, DeterminizeStats* stats = nullptr,
                    const Deadline& deadline = {});

// 1 - unique values / table size, unique counted under epsilon-keying.
double redundancy(const TabularFactor& t, double epsilon = kDefaultEpsilon);

bool entries_disjoint(const DafsaFactor& f);

// value -> sorted enumeration, one entry per line.
std::string dump(const DafsaFactor& f, std::size_t cap = 10'000);

}  // namespace dbe
