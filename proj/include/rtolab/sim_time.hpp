// Copyright 2026 The rtolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <compare>
#include <cstdint>
#include <limits>

namespace rtolab {

/// Simulation time in integer ticks. All event ordering happens on ticks so
/// runs are bit-identical across platforms.
struct SimTime {
  std::int64_t ticks = 0;

  constexpr SimTime() = default;
  constexpr explicit SimTime(std::int64_t t) : ticks(t) {}

  static constexpr SimTime zero() { return SimTime{0}; }
  /// Saturation point; timers that would land beyond it are parked here.
  static constexpr SimTime never() {
    return SimTime{std::numeric_limits<std::int64_t>::max() / 4};
  }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime d) const { return SimTime{saturating_add(ticks, d.ticks)}; }
  constexpr SimTime operator-(SimTime d) const { return SimTime{ticks - d.ticks}; }
  constexpr SimTime& operator+=(SimTime d) {
    ticks = saturating_add(ticks, d.ticks);
    return *this;
  }

 private:
  static constexpr std::int64_t saturating_add(std::int64_t a, std::int64_t b) {
    const std::int64_t cap = never().ticks;
    if (b > 0 && a > cap - b) return cap;
    return a + b;
  }
};

/// Tick resolution. The default is one microsecond.
class TickScale {
 public:
  constexpr TickScale() = default;
  explicit TickScale(std::int64_t ticks_per_second);

  std::int64_t ticks_per_second() const { return ticks_per_second_; }
  double tick_seconds() const { return 1.0 / static_cast<double>(ticks_per_second_); }

  /// Nearest tick, saturating at SimTime::never(). Negative input is an error.
  SimTime from_seconds(double seconds) const;
  double to_seconds(SimTime t) const {
    return static_cast<double>(t.ticks) / static_cast<double>(ticks_per_second_);
  }

 private:
  std::int64_t ticks_per_second_ = 1'000'000;
};

}  // namespace rtolab
