#pragma once

#include <compare>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dbe {

inline constexpr double kDefaultEpsilon = 1e-10;

// A factor value: a finite real or +infinity (hard-constraint violation).
class Value {
 public:
  constexpr Value() = default;
  constexpr explicit Value(double x) : x_(x) {}
  static constexpr Value infinity() { return Value(std::numeric_limits<double>::infinity()); }

  constexpr bool is_infinite() const { return x_ == std::numeric_limits<double>::infinity(); }
  constexpr double get() const { return x_; }

  constexpr auto operator<=>(const Value&) const = default;

 private:
  double x_ = 0.0;
};

// Shortest round-trip decimal form; "inf" for infinity.
std::string to_string(Value v);

enum class CombineOp { product, sum };
enum class ProjectOp { max, min };

constexpr Value combine_values(Value a, Value b, CombineOp op) {
  if (op == CombineOp::sum) {
    if (a.is_infinite() || b.is_infinite()) return Value::infinity();
    return Value(a.get() + b.get());
  }
  return Value(a.get() * b.get());
}

constexpr Value identity_value(CombineOp op) { return Value(op == CombineOp::sum ? 0.0 : 1.0); }

// True when `a` is strictly preferred to `b` under the projection.
constexpr bool better(Value a, Value b, ProjectOp op) { return op == ProjectOp::max ? a > b : a < b; }

// Sorted-scan clustering of values under an absolute tolerance. Scanning the
// sorted candidates, a new representative starts whenever the gap to the
// current representative exceeds epsilon; each candidate maps to the first
// element of its cluster. Infinity forms its own cluster.
class ValueKeySet {
 public:
  ValueKeySet() = default;
  static ValueKeySet cluster(std::span<const Value> values, double epsilon = kDefaultEpsilon);

  std::span<const Value> representatives() const { return reps_; }
  std::size_t size() const { return reps_.size(); }
  double epsilon() const { return epsilon_; }

  // Representative r with |v - r| <= epsilon (the cluster containing v is
  // preferred), or nullopt.
  std::optional<Value> lookup(Value v) const;
  // Index into representatives() for lookup(v).
  std::optional<std::size_t> index_of(Value v) const;

 private:
  std::vector<Value> reps_;
  double epsilon_ = kDefaultEpsilon;
};

}  // namespace dbe
