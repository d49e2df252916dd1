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

#include "domainharvester/politeness.hpp"

#include <algorithm>

namespace dh::web {

TimePoint PolitenessScheduler::next_available(const std::string& host, TimePoint now) const {
  std::lock_guard lock(mu_);
  auto it = last_.find(host);
  return it == last_.end() ? now : std::max(now, it->second + min_interval_);
}

TimePoint PolitenessScheduler::reserve(const std::string& host, TimePoint now) {
  std::lock_guard lock(mu_);
  auto [it, inserted] = last_.try_emplace(host, now);
  if (!inserted) it->second = std::max(now, it->second + min_interval_);
  return it->second;
}

}  // namespace dh::web
