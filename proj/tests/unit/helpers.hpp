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

#include <filesystem>
#include <string>
#include <unistd.h>

#include "domainharvester/pld.hpp"

namespace dh::test {

inline const std::filesystem::path kData = DH_DATA_DIR;
inline const std::filesystem::path kFixtures = DH_FIXTURE_DIR;

inline const pld::SuffixRuleSet& psl() {
  static const auto rules = pld::SuffixRuleSet::load(kData / "public_suffix_list.dat");
  return rules;
}

// Empty scratch directory, unique per process and name.
inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("dh_unit_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace dh::test
