#ifndef SAM_CLOCK_HPP
#define SAM_CLOCK_HPP

#include <chrono>
#include <memory>

namespace sam {

/// Monotonic time source used for every budget decision (step budgets,
/// session time limits, per-scenario budgets, master/global limits).
///
/// WallClock reads the steady clock. TickClock is a virtual clock the
/// solver advances by a deterministic per-node effort estimate; with it,
/// every time-limit decision in the stack becomes reproducible, which is
/// what the benchmark harness and the tests rely on.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;
  virtual void charge(double /*seconds*/) {}
  virtual bool is_virtual() const { return false; }
};

class WallClock final : public Clock {
 public:
  double now() const override {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
  }
};

class TickClock final : public Clock {
 public:
  double now() const override { return t_; }
  void charge(double seconds) override { t_ += seconds; }
  bool is_virtual() const override { return true; }
  void advance(double seconds) { t_ += seconds; }

 private:
  double t_ = 0.0;
};

using ClockPtr = std::shared_ptr<Clock>;

inline ClockPtr wall_clock() {
  static ClockPtr instance = std::make_shared<WallClock>();
  return instance;
}

/// Stopwatch over an injected clock.
class Stopwatch {
 public:
  explicit Stopwatch(const ClockPtr& clock) : clock_(clock.get()), start_(clock->now()) {}
  explicit Stopwatch(const Clock& clock) : clock_(&clock), start_(clock.now()) {}
  double elapsed() const { return clock_->now() - start_; }

 private:
  const Clock* clock_;
  double start_;
};

}  // namespace sam

#endif  // SAM_CLOCK_HPP
