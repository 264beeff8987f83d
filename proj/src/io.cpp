#include "dbe/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace dbe {

namespace {

// Whitespace tokenizer that remembers line numbers.
class Tokens {
 public:
  explicit Tokens(std::string_view text) : text_(text) {}

  std::optional<std::string_view> next() {
    skip_space();
    if (pos_ >= text_.size()) return std::nullopt;
    token_line_ = line_;
    const std::size_t begin = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return text_.substr(begin, pos_ - begin);
  }

  std::string_view expect(const char* what) {
    auto t = next();
    if (!t) throw ParseError(line_, std::string("unexpected end of input, expected ") + what);
    return *t;
  }

  long long expect_int(const char* what) {
    const auto t = expect(what);
    long long v = 0;
    auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || end != t.data() + t.size())
      throw ParseError(token_line_, std::string("expected integer ") + what + ", got '" + std::string(t) + "'");
    return v;
  }

  std::size_t expect_count(const char* what) {
    const long long v = expect_int(what);
    if (v < 0) throw ParseError(token_line_, std::string("negative ") + what);
    return static_cast<std::size_t>(v);
  }

  double expect_number(const char* what) {
    const auto t = expect(what);
    double v = 0;
    auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || end != t.data() + t.size() || std::isnan(v))
      throw ParseError(token_line_, std::string("expected number ") + what + ", got '" + std::string(t) + "'");
    return v;
  }

  void expect_end() {
    if (auto t = next()) throw ParseError(token_line_, "trailing content '" + std::string(*t) + "'");
  }

  std::size_t line() const { return token_line_; }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t token_line_ = 1;
};

// Reorders a table given in `scope` order into ascending variable order.
TabularFactor sorted_factor(const std::vector<VarId>& scope, const std::vector<std::uint32_t>& domains,
                            const std::vector<Value>& values) {
  std::vector<std::size_t> perm(scope.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return scope[a] < scope[b]; });
  std::vector<std::size_t> stride(scope.size(), 1);
  for (std::size_t i = scope.size(); i-- > 1;) stride[i - 1] = stride[i] * domains[i];

  std::vector<VarId> s;
  std::vector<std::uint32_t> d;
  for (std::size_t i : perm) {
    s.push_back(scope[i]);
    d.push_back(domains[i]);
  }
  std::vector<Value> out(values.size());
  std::vector<std::uint32_t> digit(s.size(), 0);
  for (std::size_t row = 0; row < out.size(); ++row) {
    std::size_t src = 0;
    for (std::size_t i = 0; i < s.size(); ++i) src += digit[i] * stride[perm[i]];
    out[row] = values[src];
    for (std::size_t i = s.size(); i-- > 0;) {
      if (++digit[i] < d[i]) break;
      digit[i] = 0;
    }
  }
  return TabularFactor::make(std::move(s), std::move(d), std::move(out));
}

std::vector<VarId> read_scope(Tokens& tok, std::size_t arity, std::size_t n) {
  std::vector<VarId> scope;
  for (std::size_t i = 0; i < arity; ++i) {
    const std::size_t x = tok.expect_count("variable index");
    if (x >= n) throw ParseError(tok.line(), "variable index " + std::to_string(x) + " out of range");
    if (std::find(scope.begin(), scope.end(), x) != scope.end())
      throw ParseError(tok.line(), "variable repeated in scope");
    scope.push_back(static_cast<VarId>(x));
  }
  return scope;
}

std::size_t checked_size(const std::vector<std::uint32_t>& domains, std::size_t line) {
  try {
    return table_size(domains);
  } catch (const FactorError& e) {
    throw ParseError(line, e.what());
  }
}

std::string_view sanitize_name(std::string_view name) { return name.empty() ? std::string_view("model") : name; }

}  // namespace

GraphicalModel parse_uai(std::string_view text) {
  Tokens tok(text);
  GraphicalModel m;
  m.task = Task::map;
  const auto header = tok.expect("network type");
  if (header != "MARKOV" && header != "BAYES")
    throw ParseError(tok.line(), "header must be MARKOV or BAYES, got '" + std::string(header) + "'");
  const std::size_t n = tok.expect_count("variable count");
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t d = tok.expect_count("domain size");
    if (d == 0) throw ParseError(tok.line(), "domain size must be positive");
    m.domains.push_back(static_cast<std::uint32_t>(d));
  }
  const std::size_t nf = tok.expect_count("function count");
  std::vector<std::vector<VarId>> scopes;
  for (std::size_t f = 0; f < nf; ++f) {
    const std::size_t arity = tok.expect_count("scope size");
    scopes.push_back(read_scope(tok, arity, n));
  }
  for (std::size_t f = 0; f < nf; ++f) {
    std::vector<std::uint32_t> doms;
    for (VarId x : scopes[f]) doms.push_back(m.domains[x]);
    const std::size_t size = tok.expect_count("table size");
    if (size != checked_size(doms, tok.line()))
      throw ParseError(tok.line(), "table " + std::to_string(f) + " has " + std::to_string(size) +
                                       " entries, expected " + std::to_string(table_size(doms)));
    std::vector<Value> values;
    values.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
      const double v = tok.expect_number("table value");
      if (v < 0.0 || std::isinf(v)) throw ParseError(tok.line(), "table values must be finite and non-negative");
      values.emplace_back(v);
    }
    m.factors.push_back(sorted_factor(scopes[f], doms, values));
  }
  tok.expect_end();
  return m;
}

std::string write_uai(const GraphicalModel& m) {
  std::ostringstream out;
  out << "MARKOV\n" << m.variable_count() << '\n';
  for (std::size_t i = 0; i < m.domains.size(); ++i) out << (i ? " " : "") << m.domains[i];
  out << '\n' << m.factors.size() << '\n';
  for (const TabularFactor& f : m.factors) {
    out << f.scope.size();
    for (VarId x : f.scope) out << ' ' << x;
    out << '\n';
  }
  for (const TabularFactor& f : m.factors) {
    out << '\n' << f.values.size() << '\n';
    for (std::size_t i = 0; i < f.values.size(); ++i) out << (i ? " " : "") << to_string(f.values[i]);
    out << '\n';
  }
  return out.str();
}

GraphicalModel parse_wcsp(std::string_view text) {
  Tokens tok(text);
  GraphicalModel m;
  m.task = Task::wcsp;
  m.name = std::string(tok.expect("problem name"));
  const std::size_t n = tok.expect_count("variable count");
  const std::size_t max_domain = tok.expect_count("maximum domain size");
  const std::size_t nf = tok.expect_count("function count");
  const double ub = tok.expect_number("upper bound");
  m.upper_bound = ub;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t d = tok.expect_count("domain size");
    if (d == 0 || d > max_domain) throw ParseError(tok.line(), "domain size outside [1, max domain]");
    m.domains.push_back(static_cast<std::uint32_t>(d));
  }
  auto cost = [&](double c) { return c >= ub ? Value::infinity() : Value(c); };
  for (std::size_t f = 0; f < nf; ++f) {
    const long long arity_raw = tok.expect_int("function arity");
    if (arity_raw < 0) throw ParseError(tok.line(), "global cost functions are not supported");
    const auto arity = static_cast<std::size_t>(arity_raw);
    std::vector<VarId> scope = read_scope(tok, arity, n);
    std::vector<std::uint32_t> doms;
    for (VarId x : scope) doms.push_back(m.domains[x]);
    const double def = tok.expect_number("default cost");
    const std::size_t tuples = tok.expect_count("tuple count");
    std::vector<Value> values(checked_size(doms, tok.line()), cost(def));
    std::vector<char> seen(values.size(), 0);
    for (std::size_t t = 0; t < tuples; ++t) {
      std::size_t row = 0;
      for (std::size_t i = 0; i < arity; ++i) {
        const std::size_t v = tok.expect_count("tuple value");
        if (v >= doms[i]) throw ParseError(tok.line(), "tuple value outside the domain");
        row = row * doms[i] + v;
      }
      const double c = tok.expect_number("tuple cost");
      if (seen[row]) throw ParseError(tok.line(), "duplicate tuple");
      seen[row] = 1;
      values[row] = cost(c);
    }
    m.factors.push_back(sorted_factor(scope, doms, values));
  }
  tok.expect_end();
  return m;
}

std::string write_wcsp(const GraphicalModel& m) {
  double finite_ub = 1.0;
  for (const TabularFactor& f : m.factors) {
    double worst = 0.0;
    for (Value v : f.values)
      if (!v.is_infinite()) worst = std::max(worst, v.get());
    finite_ub += std::ceil(worst);
  }
  double ub = finite_ub;
  if (m.upper_bound) {
    bool fits = true;
    for (const TabularFactor& f : m.factors)
      for (Value v : f.values)
        if (!v.is_infinite() && v.get() >= *m.upper_bound) fits = false;
    if (fits) ub = *m.upper_bound;
  }
  auto cost_text = [&](Value v) { return v.is_infinite() ? to_string(Value(ub)) : to_string(v); };

  std::uint32_t max_domain = 1;
  for (std::uint32_t d : m.domains) max_domain = std::max(max_domain, d);
  std::ostringstream out;
  out << sanitize_name(m.name) << ' ' << m.variable_count() << ' ' << max_domain << ' ' << m.factors.size() << ' '
      << to_string(Value(ub)) << '\n';
  for (std::size_t i = 0; i < m.domains.size(); ++i) out << (i ? " " : "") << m.domains[i];
  out << '\n';
  std::vector<std::uint32_t> local;
  for (const TabularFactor& f : m.factors) {
    // Most frequent value becomes the default; ties go to the smallest.
    std::map<Value, std::size_t> freq;
    for (Value v : f.values) ++freq[v];
    Value def = freq.begin()->first;
    std::size_t best = 0;
    for (auto [v, c] : freq)
      if (c > best) {
        best = c;
        def = v;
      }
    out << f.scope.size();
    for (VarId x : f.scope) out << ' ' << x;
    out << ' ' << cost_text(def) << ' ' << (f.values.size() - best) << '\n';
    local.assign(f.scope.size(), 0);
    for (std::size_t row = 0; row < f.values.size(); ++row) {
      if (f.values[row] == def) continue;
      f.decode(row, local);
      for (std::uint32_t v : local) out << v << ' ';
      out << cost_text(f.values[row]) << '\n';
    }
  }
  return out.str();
}

std::optional<InstanceFormat> format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".uai") return InstanceFormat::uai;
  if (ext == ".wcsp") return InstanceFormat::wcsp;
  return std::nullopt;
}

GraphicalModel load_instance(const std::filesystem::path& path, std::optional<InstanceFormat> format) {
  if (!format) format = format_from_path(path);
  if (!format) throw ParseError(0, "cannot infer format from extension of " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  GraphicalModel m = *format == InstanceFormat::uai ? parse_uai(buf.str()) : parse_wcsp(buf.str());
  if (m.name.empty()) m.name = path.stem().string();
  return m;
}

namespace {

nlohmann::ordered_json value_json(Value v) {
  if (v.is_infinite()) return "inf";
  return v.get();
}

}  // namespace

std::string format_json_line(const ResultRecord& r) {
  nlohmann::ordered_json j;
  j["file"] = r.file;
  j["task"] = to_string(r.task);
  j["engine"] = r.engine;
  j["status"] = r.status;
  if (r.optimum) j["optimum"] = value_json(*r.optimum);
  if (!r.assignment.empty()) j["assignment"] = r.assignment;
  if (!r.checks.empty()) {
    nlohmann::ordered_json c;
    for (const auto& [engine, verdict] : r.checks) c[engine] = verdict;
    j["checks"] = c;
  }
  if (!r.message.empty()) j["message"] = r.message;
  nlohmann::ordered_json s;
  s["induced_width"] = r.stats.induced_width;
  s["buckets_processed"] = r.stats.buckets_processed;
  s["max_entry_count"] = r.stats.max_entry_count;
  s["max_automaton_states"] = r.stats.max_automaton_states;
  s["peak_logical_size"] = r.stats.peak_logical_size;
  s["determinizations"] = r.stats.determinizations;
  s["determinization_growth_avg"] = r.stats.determinization_growth_avg;
  s["determinization_growth_max"] = r.stats.determinization_growth_max;
  s["redundancy"] = r.redundancy;
  double mean = 0.0;
  for (double x : r.redundancy) mean += x;
  s["redundancy_mean"] = r.redundancy.empty() ? 0.0 : mean / static_cast<double>(r.redundancy.size());
  if (r.include_timings) s["wall_time_seconds"] = r.stats.wall_time_seconds;
  j["stats"] = s;
  return j.dump() + "\n";
}

std::string format_human(const ResultRecord& r) {
  std::ostringstream out;
  out << r.file << " [" << to_string(r.task) << ", " << r.engine << "]: " << r.status << '\n';
  if (r.optimum) out << "  optimum: " << to_string(*r.optimum) << '\n';
  if (!r.assignment.empty()) {
    out << "  assignment:";
    for (std::uint32_t v : r.assignment) out << ' ' << v;
    out << '\n';
  }
  for (const auto& [engine, verdict] : r.checks) out << "  check " << engine << ": " << verdict << '\n';
  if (!r.message.empty()) out << "  note: " << r.message << '\n';
  out << "  induced width " << r.stats.induced_width << ", buckets " << r.stats.buckets_processed
      << ", peak logical size " << r.stats.peak_logical_size << ", max entries " << r.stats.max_entry_count
      << ", max states " << r.stats.max_automaton_states << '\n';
  out << "  determinizations " << r.stats.determinizations << ", average growth "
      << r.stats.determinization_growth_avg * 100.0 << "%\n";
  if (!r.redundancy.empty()) {
    double mean = 0.0;
    for (double x : r.redundancy) mean += x;
    out << "  mean factor redundancy " << mean / static_cast<double>(r.redundancy.size()) << '\n';
  }
  out << "  solve time " << r.stats.wall_time_seconds << " s\n";
  return out.str();
}

}  // namespace dbe
