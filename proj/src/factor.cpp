#include "dbe/factor.hpp"

#include <algorithm>
#include <sstream>

namespace dbe {

std::size_t table_size(std::span<const std::uint32_t> domains) {
  std::size_t n = 1;
  for (std::uint32_t d : domains) {
    if (d == 0) throw FactorError("empty domain");
    if (n > std::numeric_limits<std::size_t>::max() / d) throw FactorError("table size overflows");
    n *= d;
  }
  return n;
}

TabularFactor TabularFactor::make(std::vector<VarId> scope, std::vector<std::uint32_t> domains,
                                  std::vector<Value> values) {
  if (scope.size() != domains.size()) throw FactorError("scope and domain lists differ in length");
  for (std::size_t i = 1; i < scope.size(); ++i)
    if (scope[i - 1] >= scope[i]) throw FactorError("scope must be strictly increasing");
  if (values.size() != table_size(domains)) throw FactorError("table length does not match domains");
  return TabularFactor{std::move(scope), std::move(domains), std::move(values)};
}

TabularFactor TabularFactor::constant(std::vector<VarId> scope, std::vector<std::uint32_t> domains, Value v) {
  std::vector<Value> values(table_size(domains), v);
  return make(std::move(scope), std::move(domains), std::move(values));
}

std::size_t TabularFactor::index_of(std::span<const std::uint32_t> local) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < domains.size(); ++i) idx = idx * domains[i] + local[i];
  return idx;
}

void TabularFactor::decode(std::size_t row, std::span<std::uint32_t> local) const {
  for (std::size_t i = domains.size(); i-- > 0;) {
    local[i] = static_cast<std::uint32_t>(row % domains[i]);
    row /= domains[i];
  }
}

DafsaFactor::DafsaFactor(std::vector<VarId> scope, std::vector<std::uint32_t> domains,
                         std::vector<FactorEntry> entries)
    : scope_(std::move(scope)), domains_(std::move(domains)), entries_(std::move(entries)) {
  if (scope_.size() != domains_.size()) throw FactorError("scope and domain lists differ in length");
  for (std::size_t i = 1; i < scope_.size(); ++i)
    if (scope_[i - 1] >= scope_[i]) throw FactorError("scope must be strictly increasing");
  for (const FactorEntry& e : entries_)
    if (!std::ranges::equal(e.automaton.level_domains(), domains_))
      throw FactorError("entry automaton levels do not match the scope");
  std::sort(entries_.begin(), entries_.end(),
            [](const FactorEntry& a, const FactorEntry& b) { return a.value < b.value; });
  for (std::size_t i = 1; i < entries_.size(); ++i)
    if (entries_[i - 1].value == entries_[i].value) throw FactorError("duplicate entry value");
}

DafsaFactor DafsaFactor::scalar(Value v) {
  std::vector<FactorEntry> entries;
  entries.push_back({v, Dafsa::universal({})});
  return DafsaFactor({}, {}, std::move(entries));
}

std::size_t DafsaFactor::total_states() const {
  std::size_t n = 0;
  for (const FactorEntry& e : entries_) n += e.automaton.state_count();
  return n;
}

std::optional<Value> DafsaFactor::value_at(std::span<const std::uint32_t> local) const {
  for (const FactorEntry& e : entries_)
    if (accepts(e.automaton, local)) return e.value;
  return std::nullopt;
}

std::optional<std::size_t> DafsaFactor::level_of(VarId x) const {
  auto it = std::lower_bound(scope_.begin(), scope_.end(), x);
  if (it == scope_.end() || *it != x) return std::nullopt;
  return static_cast<std::size_t>(it - scope_.begin());
}

DafsaFactor from_table(const TabularFactor& t, double epsilon, bool drop_infinity) {
  const ValueKeySet keys = ValueKeySet::cluster(t.values, epsilon);
  std::vector<DafsaBuilder> builders;
  builders.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) builders.emplace_back(t.domains);

  // Rows come in lexicographic order, so each group receives sorted words.
  Word local(t.domains.size(), 0);
  for (std::size_t row = 0; row < t.values.size(); ++row) {
    if (row > 0) {
      for (std::size_t i = local.size(); i-- > 0;) {
        if (++local[i] < t.domains[i]) break;
        local[i] = 0;
      }
    }
    if (drop_infinity && t.values[row].is_infinite()) continue;
    builders[*keys.index_of(t.values[row])].add(local);
  }

  std::vector<FactorEntry> entries;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (builders[i].word_count() == 0) continue;
    entries.push_back({keys.representatives()[i], builders[i].finish()});
  }
  return DafsaFactor(t.scope, t.domains, std::move(entries));
}

TabularFactor to_table(const DafsaFactor& f, Value default_value, std::size_t cap) {
  std::vector<std::uint32_t> domains(f.domains().begin(), f.domains().end());
  const std::size_t cells = table_size(domains);
  if (cells > cap) throw FactorError("table expansion exceeds cap");
  TabularFactor t = TabularFactor::constant({f.scope().begin(), f.scope().end()}, std::move(domains), default_value);
  for (const FactorEntry& e : f.entries())
    for (const Word& w : enumerate(e.automaton, cells)) t.values[t.index_of(w)] = e.value;
  return t;
}

std::pair<DafsaFactor, DafsaFactor> add_levels(const DafsaFactor& f1, const DafsaFactor& f2) {
  std::vector<VarId> scope;
  std::vector<std::uint32_t> domains;
  {
    std::size_t i = 0, j = 0;
    const auto s1 = f1.scope(), s2 = f2.scope();
    while (i < s1.size() || j < s2.size()) {
      if (j == s2.size() || (i < s1.size() && s1[i] < s2[j])) {
        scope.push_back(s1[i]);
        domains.push_back(f1.domains()[i++]);
      } else if (i == s1.size() || s2[j] < s1[i]) {
        scope.push_back(s2[j]);
        domains.push_back(f2.domains()[j++]);
      } else {
        if (f1.domains()[i] != f2.domains()[j])
          throw FactorError("shared variable " + std::to_string(s1[i]) + " has different domains");
        scope.push_back(s1[i]);
        domains.push_back(f1.domains()[i]);
        ++i;
        ++j;
      }
    }
  }
  auto extend = [&](const DafsaFactor& f) {
    if (f.scope().size() == scope.size()) return f;
    std::vector<std::size_t> positions;
    for (VarId x : f.scope())
      positions.push_back(static_cast<std::size_t>(std::lower_bound(scope.begin(), scope.end(), x) - scope.begin()));
    std::vector<FactorEntry> entries;
    for (const FactorEntry& e : f.entries())
      entries.push_back({e.value, insert_wildcard_levels(e.automaton, domains, positions)});
    return DafsaFactor(scope, domains, std::move(entries));
  };
  return {extend(f1), extend(f2)};
}

DafsaFactor remove_level(const DafsaFactor& f, VarId x, DeterminizeStats* stats) {
  const auto level = f.level_of(x);
  if (!level) throw FactorError("variable " + std::to_string(x) + " is not in the scope");
  std::vector<VarId> scope(f.scope().begin(), f.scope().end());
  std::vector<std::uint32_t> domains(f.domains().begin(), f.domains().end());
  scope.erase(scope.begin() + static_cast<std::ptrdiff_t>(*level));
  domains.erase(domains.begin() + static_cast<std::ptrdiff_t>(*level));
  std::vector<FactorEntry> entries;
  for (const FactorEntry& e : f.entries()) entries.push_back({e.value, remove_level(e.automaton, *level, stats)});
  return DafsaFactor(std::move(scope), std::move(domains), std::move(entries));
}

DafsaFactor combine(const DafsaFactor& f1, const DafsaFactor& f2, CombineOp op, double epsilon,
                    const Deadline& deadline) {
  auto [g1, g2] = add_levels(f1, f2);

  std::vector<FactorEntry> pieces;
  for (const FactorEntry& a : g1.entries()) {
    for (const FactorEntry& b : g2.entries()) {
      deadline.check();
      Dafsa common = intersect(a.automaton, b.automaton);
      if (common.empty_language()) continue;
      pieces.push_back({combine_values(a.value, b.value, op), std::move(common)});
    }
  }

  std::vector<Value> candidates;
  candidates.reserve(pieces.size());
  for (const FactorEntry& p : pieces) candidates.push_back(p.value);
  const ValueKeySet keys = ValueKeySet::cluster(candidates, epsilon);

  std::vector<std::optional<Dafsa>> merged(keys.size());
  for (FactorEntry& p : pieces) {
    deadline.check();
    auto& slot = merged[*keys.index_of(p.value)];
    if (slot) slot = unite(*slot, p.automaton);
    else slot = std::move(p.automaton);
  }

  std::vector<FactorEntry> entries;
  for (std::size_t i = 0; i < keys.size(); ++i) entries.push_back({keys.representatives()[i], std::move(*merged[i])});
  return DafsaFactor({g1.scope().begin(), g1.scope().end()}, {g1.domains().begin(), g1.domains().end()},
                     std::move(entries));
}

DafsaFactor project(const DafsaFactor& f, VarId x, ProjectOp op, DeterminizeStats* stats,
                    const Deadline& deadline) {
  const DafsaFactor reduced = remove_level(f, x, stats);
  const auto domains = reduced.domains();

  // Entries are stored by increasing value; max visits them in reverse.
  std::vector<const FactorEntry*> order;
  for (const FactorEntry& e : reduced.entries()) order.push_back(&e);
  if (op == ProjectOp::max) std::reverse(order.begin(), order.end());

  std::vector<FactorEntry> entries;
  Dafsa covered = Dafsa::empty({domains.begin(), domains.end()});
  for (const FactorEntry* e : order) {
    deadline.check();
    Dafsa fresh = difference(e->automaton, covered);
    if (fresh.empty_language()) continue;
    covered = unite(covered, fresh);
    entries.push_back({e->value, std::move(fresh)});
  }
  return DafsaFactor({reduced.scope().begin(), reduced.scope().end()}, {domains.begin(), domains.end()},
                     std::move(entries));
}

double redundancy(const TabularFactor& t, double epsilon) {
  if (t.values.empty()) throw FactorError("redundancy of an empty table");
  const ValueKeySet keys = ValueKeySet::cluster(t.values, epsilon);
  return 1.0 - static_cast<double>(keys.size()) / static_cast<double>(t.values.size());
}

bool entries_disjoint(const DafsaFactor& f) {
  const auto entries = f.entries();
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = i + 1; j < entries.size(); ++j)
      if (!intersect(entries[i].automaton, entries[j].automaton).empty_language()) return false;
  return true;
}

std::string dump(const DafsaFactor& f, std::size_t cap) {
  std::ostringstream out;
  out << "scope";
  for (VarId x : f.scope()) out << ' ' << x;
  out << '\n';
  for (const FactorEntry& e : f.entries()) {
    out << to_string(e.value) << ':';
    for (const Word& w : enumerate(e.automaton, cap)) {
      out << ' ';
      for (std::uint32_t v : w) out << v;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace dbe
