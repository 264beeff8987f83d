#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>

namespace dbe {

class TimeLimitExceeded : public std::runtime_error {
 public:
  TimeLimitExceeded() : std::runtime_error("time limit exceeded") {}
};

// Wall-clock budget polled between expensive steps. Default-constructed
// deadlines never expire.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  Deadline() = default;
  explicit Deadline(std::chrono::duration<double> budget)
      : at_(Clock::now() + std::chrono::duration_cast<Clock::duration>(budget)) {}

  bool expired() const { return at_ && Clock::now() >= *at_; }
  void check() const {
    if (expired()) throw TimeLimitExceeded();
  }

 private:
  std::optional<Clock::time_point> at_;
};

}  // namespace dbe
