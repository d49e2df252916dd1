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

#include <compare>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>

namespace dh::pld {

// Public-suffix rules in the standard list format. Immutable after load, so
// lookups may run from any number of threads.
class SuffixRuleSet {
 public:
  static SuffixRuleSet load(const std::filesystem::path& path);
  static SuffixRuleSet parse(std::istream& in, std::string source_version = {});
  static SuffixRuleSet parse(std::string_view text, std::string source_version = {});

  // The longest matching public suffix of an ASCII, lowercase host, honoring
  // wildcard and exception rules; unlisted TLDs fall back to the implicit "*".
  std::string public_suffix(std::string_view host) const;

  const std::string& source_version() const noexcept { return source_version_; }
  std::size_t size() const noexcept { return plain_.size() + wildcard_.size() + exception_.size(); }

 private:
  std::unordered_set<std::string> plain_;
  std::unordered_set<std::string> wildcard_;   // "*.foo" stored as "foo"
  std::unordered_set<std::string> exception_;  // "!bar.foo" stored as "bar.foo"
  std::string source_version_;
};

// The registrable ("pay-level") domain: one label more than its public suffix.
struct PayLevelDomain {
  std::string name;
  std::string suffix;

  friend bool operator==(const PayLevelDomain& a, const PayLevelDomain& b) { return a.name == b.name; }
  friend auto operator<=>(const PayLevelDomain& a, const PayLevelDomain& b) { return a.name <=> b.name; }
};

// Lowercases, punycodes and strips a single trailing dot; throws InvalidHostname.
std::string canonical_host(std::string_view host);

bool is_ip_literal(std::string_view host);

// Throws NoRegistrableDomain / InvalidHostname.
PayLevelDomain extract_pld(std::string_view host, const SuffixRuleSet& rules);

// Accepts a URL, FQDN or domain as found in third-party lists. Throws
// IPAddressEntry for IP literals in addition to the extract_pld errors.
PayLevelDomain normalize_entry(std::string_view entry, const SuffixRuleSet& rules);

}  // namespace dh::pld
