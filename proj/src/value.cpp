#include "dbe/value.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace dbe {

std::string to_string(Value v) {
  if (v.is_infinite()) return "inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v.get());
  return std::string(buf, end);
}

ValueKeySet ValueKeySet::cluster(std::span<const Value> values, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  std::vector<Value> sorted(values.begin(), values.end());
  for (Value v : sorted)
    if (std::isnan(v.get()) || v.get() == -std::numeric_limits<double>::infinity())
      throw std::invalid_argument("values must be finite or +infinity");
  std::sort(sorted.begin(), sorted.end());
  ValueKeySet keys;
  keys.epsilon_ = epsilon;
  for (Value v : sorted) {
    if (keys.reps_.empty()) {
      keys.reps_.push_back(v);
      continue;
    }
    Value rep = keys.reps_.back();
    if (v.is_infinite()) {
      if (!rep.is_infinite()) keys.reps_.push_back(v);
    } else if (v.get() - rep.get() > epsilon) {
      keys.reps_.push_back(v);
    }
  }
  return keys;
}

std::optional<std::size_t> ValueKeySet::index_of(Value v) const {
  if (reps_.empty()) return std::nullopt;
  if (v.is_infinite()) {
    if (reps_.back().is_infinite()) return reps_.size() - 1;
    return std::nullopt;
  }
  // last representative <= v
  auto it = std::upper_bound(reps_.begin(), reps_.end(), v);
  if (it != reps_.begin()) {
    auto prev = std::prev(it);
    if (!prev->is_infinite() && v.get() - prev->get() <= epsilon_)
      return static_cast<std::size_t>(prev - reps_.begin());
  }
  if (it != reps_.end() && !it->is_infinite() && it->get() - v.get() <= epsilon_)
    return static_cast<std::size_t>(it - reps_.begin());
  return std::nullopt;
}

std::optional<Value> ValueKeySet::lookup(Value v) const {
  if (auto i = index_of(v)) return reps_[*i];
  return std::nullopt;
}

}  // namespace dbe
