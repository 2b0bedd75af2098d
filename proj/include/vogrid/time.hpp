/*
 * This file is part of vogrid, a desk-scale virtual-organization grid.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

namespace vogrid {

/// Simulated time in integer microseconds. Integer ticks keep the event
/// order and every derived duration exactly reproducible for a given seed.
using Ticks = std::int64_t;

constexpr Ticks kTicksPerSecond = 1'000'000;

inline Ticks seconds(std::int64_t s) { return s * kTicksPerSecond; }

/// Parses a decimal seconds string ("0.1", "3600") into ticks without
/// going through floating point.
Ticks parse_seconds(const std::string& text);

/// Renders ticks as seconds with six decimals ("12.300000").
std::string format_ticks(Ticks t);

using TimeFn = std::function<Ticks()>;

/// Discrete-event virtual clock. Events fire in (time, insertion sequence)
/// order; time never decreases.
class SimClock {
 public:
  Ticks now() const { return now_; }

  /// Schedules fn at absolute time t (>= now).
  void schedule_at(Ticks t, std::function<void()> fn);
  /// Schedules fn at now + delay.
  void schedule_in(Ticks delay, std::function<void()> fn) { schedule_at(now_ + delay, std::move(fn)); }

  bool empty() const { return queue_.empty(); }
  std::size_t pending() const { return queue_.size(); }

  /// Runs the next event; returns false when the queue is empty.
  bool step();

  /// Runs events until the queue drains or the next event is past `until`.
  /// The clock is left at min(until, time of last executed event).
  void run_until(Ticks until);

  TimeFn time_fn() {
    return [this] { return now_; };
  }

 private:
  struct Event {
    Ticks t;
    std::uint64_t seq;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.t != b.t) return a.t > b.t;
      return a.seq > b.seq;
    }
  };

  Ticks now_ = 0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

}  // namespace vogrid
