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

#include "domainharvester/clock.hpp"

#include <cstdio>
#include <thread>

#include "domainharvester/error.hpp"

namespace dh {

TimePoint SystemClock::now() const {
  return std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now());
}

void SystemClock::sleep_until(TimePoint t) { std::this_thread::sleep_until(t); }

SimulatedClock::SimulatedClock(TimePoint start) : now_(start) {}

TimePoint SimulatedClock::now() const {
  std::lock_guard lock(mu_);
  return now_;
}

void SimulatedClock::sleep_until(TimePoint t) {
  std::lock_guard lock(mu_);
  if (t > now_) now_ = t;
}

void SimulatedClock::advance(Duration d) {
  std::lock_guard lock(mu_);
  if (d.count() > 0) now_ += d;
}

void SimulatedClock::set(TimePoint t) {
  std::lock_guard lock(mu_);
  now_ = t;
}

std::string format_timestamp(TimePoint t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld.%03ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()), static_cast<long>(hms.subseconds().count()));
  return buf;
}

TimePoint parse_timestamp(const std::string& text) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0, ms = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%n", &y, &mo, &d, &h, &mi, &s, &consumed) != 6) {
    throw Error(Errc::InvalidArgument, "bad timestamp '" + text + "'");
  }
  std::string rest = text.substr(static_cast<std::size_t>(consumed));
  if (!rest.empty() && rest[0] == '.') {
    if (std::sscanf(rest.c_str(), ".%3u", &ms) != 1) throw Error(Errc::InvalidArgument, "bad timestamp '" + text + "'");
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok()) throw Error(Errc::InvalidArgument, "bad timestamp '" + text + "'");
  return TimePoint{sys_days{ymd}} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
}

std::string format_date(TimePoint t) {
  using namespace std::chrono;
  const year_month_day ymd{floor<days>(t)};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

TimePoint parse_date(const std::string& text) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0, d = 0;
  if (std::sscanf(text.c_str(), "%4d-%2u-%2u", &y, &mo, &d) != 3) {
    throw Error(Errc::InvalidArgument, "bad date '" + text + "'");
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok()) throw Error(Errc::InvalidArgument, "bad date '" + text + "'");
  return TimePoint{sys_days{ymd}};
}

}  // namespace dh
