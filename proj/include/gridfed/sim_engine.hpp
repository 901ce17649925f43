#pragma once

#include <cstdint>
#include <queue>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gridfed/types.hpp"

namespace gridfed {

enum class EventKind : std::uint8_t {
  JobSubmit,
  BidArrive,
  BidReply,
  BidExpiry,
  JobDispatchArrive,
  JobFinish,
  ResultReturn,
};

constexpr std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::JobSubmit: return "JobSubmit";
    case EventKind::BidArrive: return "BidArrive";
    case EventKind::BidReply: return "BidReply";
    case EventKind::BidExpiry: return "BidExpiry";
    case EventKind::JobDispatchArrive: return "JobDispatchArrive";
    case EventKind::JobFinish: return "JobFinish";
    case EventKind::ResultReturn: return "ResultReturn";
  }
  return "?";
}

// Default-constructed handles refer to no event; cancelling one is a no-op.
struct EventHandle {
  static constexpr std::uint64_t kNone = ~std::uint64_t{0};

  std::uint64_t seq = kNone;

  bool valid() const noexcept { return seq != kNone; }
  auto operator<=>(const EventHandle&) const = default;
};

/// Sequential discrete-event core.
///
/// Events fire in ascending (time, seq) order; seq is the insertion counter, so
/// events scheduled for the same instant fire in the order they were scheduled.
/// Cancelled events stay in the heap and are skipped when popped.
template <class Payload>
class Engine {
 public:
  struct Event {
    SimTime time = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::JobSubmit;
    Payload payload{};
  };

  SimTime now() const noexcept { return now_; }
  std::size_t pending() const noexcept { return live_.size(); }
  std::uint64_t dispatched() const noexcept { return dispatched_; }

  EventHandle schedule(SimTime time, EventKind kind, Payload payload) {
    if (!(time >= now_)) {
      throw SimulationError("event scheduled in the past: t=" + std::to_string(time) +
                            " now=" + std::to_string(now_));
    }
    const std::uint64_t seq = next_seq_++;
    queue_.push(Event{time, seq, kind, std::move(payload)});
    live_.insert(seq);
    return EventHandle{seq};
  }

  EventHandle schedule_in(SimTime delay, EventKind kind, Payload payload) {
    return schedule(now_ + delay, kind, std::move(payload));
  }

  // True iff the event was still waiting to fire.
  bool cancel(EventHandle handle) { return live_.erase(handle.seq) > 0; }

  bool is_pending(EventHandle handle) const { return live_.contains(handle.seq); }

  /// Fires every event with time <= limit, calling handler(const Event&) for
  /// each. The clock ends at the last fired event's time.
  template <class Handler>
  SimTime run_until(SimTime limit, Handler&& handler) {
    if (limit < now_) {
      throw SimulationError("run_until limit precedes the clock");
    }
    while (!queue_.empty()) {
      const Event& top = queue_.top();
      if (top.time > limit) break;
      Event ev = top;
      queue_.pop();
      if (live_.erase(ev.seq) == 0) continue;  // cancelled
      now_ = ev.time;
      ++dispatched_;
      handler(std::as_const(ev));
    }
    return now_;
  }

  template <class Handler>
  SimTime run(Handler&& handler) {
    return run_until(kForever, std::forward<Handler>(handler));
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::unordered_set<std::uint64_t> live_;
};

}  // namespace gridfed
