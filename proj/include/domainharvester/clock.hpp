// Copyright 2026 The DomainHarvester Authors
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

#include <chrono>
#include <mutex>
#include <string>

namespace dh {

using Duration = std::chrono::milliseconds;
using TimePoint = std::chrono::sys_time<Duration>;

// Time source for everything that observes or waits on wall-clock time.
// Crawls under test run against SimulatedClock so politeness delays cost
// nothing and timestamps are reproducible.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual TimePoint now() const = 0;
  virtual void sleep_until(TimePoint t) = 0;
};

class SystemClock final : public Clock {
 public:
  TimePoint now() const override;
  void sleep_until(TimePoint t) override;
};

// Virtual time: sleep_until jumps forward instead of blocking. Safe to share
// between threads; time never moves backwards.
class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(TimePoint start);

  TimePoint now() const override;
  void sleep_until(TimePoint t) override;
  void advance(Duration d);
  void set(TimePoint t);

 private:
  mutable std::mutex mu_;
  TimePoint now_;
};

// "2022-11-18T00:00:03.250Z"
std::string format_timestamp(TimePoint t);
TimePoint parse_timestamp(const std::string& text);

// "2022-11-18"
std::string format_date(TimePoint t);
TimePoint parse_date(const std::string& text);

}  // namespace dh
