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

#include <string>
#include <string_view>
#include <vector>

namespace dh::web {

// robots.txt rules for one user agent. Longest matching pattern wins; on a
// tie Allow wins. Supports '*' wildcards and a trailing '$' anchor.
class RobotsRules {
 public:
  static RobotsRules allow_all() { return RobotsRules{}; }
  static RobotsRules parse(std::string_view text, std::string_view user_agent);

  bool allowed(std::string_view path_and_query) const;
  bool disallows_everything() const;

 private:
  struct Rule {
    std::string pattern;
    bool allow = false;
  };
  std::vector<Rule> rules_;
};

// "DomainHarvesterBot/1.0 (+https://...)" -> "domainharvesterbot"
std::string robots_product_token(std::string_view user_agent);

}  // namespace dh::web
