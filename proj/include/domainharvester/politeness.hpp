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

#include <map>
#include <mutex>
#include <string>

#include "domainharvester/clock.hpp"

namespace dh::web {

// Per-host request spacing. reserve() hands out the earliest slot for a
// host that is at least min_interval after that host's previous slot; the
// caller waits on its clock until the slot arrives.
class PolitenessScheduler {
 public:
  explicit PolitenessScheduler(Duration min_interval) : min_interval_(min_interval) {}

  TimePoint reserve(const std::string& host, TimePoint now);
  TimePoint next_available(const std::string& host, TimePoint now) const;
  Duration min_interval() const noexcept { return min_interval_; }

 private:
  Duration min_interval_;
  mutable std::mutex mu_;
  std::map<std::string, TimePoint> last_;
};

}  // namespace dh::web
