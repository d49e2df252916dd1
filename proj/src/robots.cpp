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

#include "domainharvester/robots.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace dh::web {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool match_pattern(std::string_view pattern, std::string_view path) {
  bool anchored = !pattern.empty() && pattern.back() == '$';
  if (anchored) pattern.remove_suffix(1);
  // Iterative wildcard match with backtracking on the last '*'.
  std::size_t p = 0, s = 0, star = std::string_view::npos, mark = 0;
  while (s < path.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = s;
    } else if (p < pattern.size() && pattern[p] == path[s]) {
      ++p;
      ++s;
    } else if (p == pattern.size() && !anchored) {
      return true;  // prefix match
    } else if (star != std::string_view::npos) {
      p = star + 1;
      s = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace

std::string robots_product_token(std::string_view user_agent) {
  std::string token;
  for (char c : user_agent) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') {
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      break;
    }
  }
  return token;
}

RobotsRules RobotsRules::parse(std::string_view text, std::string_view user_agent) {
  const std::string token = robots_product_token(user_agent);
  struct Group {
    std::vector<std::string> agents;
    std::vector<Rule> rules;
  };
  std::vector<Group> groups;
  bool last_was_agent = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = lower(trim(std::string_view(line).substr(0, colon)));
    const std::string value = trim(std::string_view(line).substr(colon + 1));
    if (key == "user-agent") {
      if (!last_was_agent || groups.empty()) groups.emplace_back();
      groups.back().agents.push_back(lower(value));
      last_was_agent = true;
    } else if (key == "allow" || key == "disallow") {
      last_was_agent = false;
      if (groups.empty()) continue;
      if (key == "disallow" && value.empty()) continue;  // "Disallow:" allows everything
      groups.back().rules.push_back({value, key == "allow"});
    } else {
      last_was_agent = false;
    }
  }

  RobotsRules out;
  const Group* star = nullptr;
  bool matched = false;
  for (const auto& g : groups) {
    for (const auto& agent : g.agents) {
      if (agent == "*") {
        if (!star) star = &g;
      } else if (!token.empty() && token.find(agent) != std::string::npos) {
        out.rules_.insert(out.rules_.end(), g.rules.begin(), g.rules.end());
        matched = true;
      }
    }
  }
  if (!matched && star) out.rules_ = star->rules;
  return out;
}

bool RobotsRules::allowed(std::string_view path) const {
  if (path == "/robots.txt") return true;
  const Rule* best = nullptr;
  for (const auto& r : rules_) {
    if (!match_pattern(r.pattern, path)) continue;
    if (!best || r.pattern.size() > best->pattern.size() ||
        (r.pattern.size() == best->pattern.size() && r.allow && !best->allow)) {
      best = &r;
    }
  }
  return !best || best->allow;
}

bool RobotsRules::disallows_everything() const { return !allowed("/"); }

}  // namespace dh::web
