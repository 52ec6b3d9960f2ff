#include "fanet/engine/simulator.hpp"

#include <string>

namespace fanet::engine {

EventHandle Simulator::schedule(SimTime fire_time, std::function<void()> action, EventKind kind) {
  if (fire_time < now_) {
    throw ScheduleError("event scheduled at t=" + std::to_string(fire_time) +
                        " before current time t=" + std::to_string(now_));
  }
  const std::uint64_t sequence = next_sequence_++;
  retired_.push_back(false);
  std::uint32_t slot = 0;
  if (free_slots_.empty()) {
    slot = static_cast<std::uint32_t>(actions_.size());
    actions_.push_back(std::move(action));
  } else {
    slot = free_slots_.back();
    free_slots_.pop_back();
    actions_[slot] = std::move(action);
  }
  queue_.push(Entry{fire_time, sequence, slot, kind});
  return EventHandle(sequence);
}

bool Simulator::cancel(const EventHandle& handle) {
  if (!handle.valid() || handle.sequence() >= next_sequence_) return false;
  if (retired_[handle.sequence()]) return false;
  retired_[handle.sequence()] = true;
  ++cancelled_in_queue_;
  return true;
}

std::uint64_t Simulator::run_until(SimTime t_end) {
  std::uint64_t dispatched = 0;
  while (!queue_.empty() && queue_.top().fire_time <= t_end) {
    const Entry event = queue_.top();
    queue_.pop();
    std::function<void()> action = std::move(actions_[event.slot]);
    actions_[event.slot] = nullptr;
    free_slots_.push_back(event.slot);
    if (retired_[event.sequence]) {
      --cancelled_in_queue_;
      continue;
    }
    retired_[event.sequence] = true;
    now_ = event.fire_time;
    ++dispatched;
    ++dispatched_total_;
    if (observer_) observer_(event.fire_time, event.sequence, event.kind);
    if (action) action();
  }
  if (t_end > now_) now_ = t_end;
  return dispatched;
}

}  // namespace fanet::engine
