#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace fanet::engine {

/// Virtual time in seconds.
using SimTime = double;

/// What an event does. Used only for tracing and for the dispatch log.
enum class EventKind : std::uint8_t {
  generic,
  mobility_step,
  frame_delivery,
  timer_expiry,
  traffic_emission,
  attack_burst,
};

class EventHandle {
 public:
  EventHandle() = default;
  explicit EventHandle(std::uint64_t sequence) : sequence_(sequence), valid_(true) {}

  [[nodiscard]] bool valid() const { return valid_; }
  [[nodiscard]] std::uint64_t sequence() const { return sequence_; }

 private:
  std::uint64_t sequence_ = 0;
  bool valid_ = false;
};

/// Thrown when an event is scheduled before the current clock.
class ScheduleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Single-threaded discrete-event core. Events fire in (fire_time, sequence)
/// order; equal times dispatch in insertion order.
class Simulator {
 public:
  using DispatchObserver = std::function<void(SimTime, std::uint64_t, EventKind)>;

  [[nodiscard]] SimTime now() const { return now_; }

  EventHandle schedule(SimTime fire_time, std::function<void()> action,
                       EventKind kind = EventKind::generic);
  EventHandle schedule_in(SimTime delay, std::function<void()> action,
                          EventKind kind = EventKind::generic) {
    return schedule(now_ + delay, std::move(action), kind);
  }

  /// Returns false if the event already fired, was cancelled, or the handle is empty.
  bool cancel(const EventHandle& handle);

  /// Dispatches every event with fire_time <= t_end, then sets the clock to t_end.
  std::uint64_t run_until(SimTime t_end);

  [[nodiscard]] std::size_t pending() const { return queue_.size() - cancelled_in_queue_; }
  [[nodiscard]] std::uint64_t dispatched_total() const { return dispatched_total_; }

  void set_dispatch_observer(DispatchObserver observer) { observer_ = std::move(observer); }

 private:
  // Heap entries stay small; actions live in a slot table reused after dispatch.
  struct Entry {
    SimTime fire_time;
    std::uint64_t sequence;
    std::uint32_t slot;
    EventKind kind;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.sequence > b.sequence;
    }
  };

  SimTime now_ = 0.0;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t dispatched_total_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::vector<std::function<void()>> actions_;
  std::vector<std::uint32_t> free_slots_;
  // Indexed by sequence: set once an event has fired or been cancelled.
  std::vector<bool> retired_;
  std::size_t cancelled_in_queue_ = 0;
  DispatchObserver observer_;
};

}  // namespace fanet::engine
