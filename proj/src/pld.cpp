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

#include "domainharvester/pld.hpp"

#include <arpa/inet.h>

#include <fstream>
#include <sstream>
#include <vector>

#include "domainharvester/digest.hpp"
#include "domainharvester/error.hpp"
#include "domainharvester/punycode.hpp"

namespace dh::pld {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_label(std::string_view label) {
  if (label.empty() || label.size() > 63) return false;
  if (label.front() == '-' || label.back() == '-') return false;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

SuffixRuleSet SuffixRuleSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open suffix list " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(std::string_view(buf.str()));
}

SuffixRuleSet SuffixRuleSet::parse(std::string_view text, std::string source_version) {
  std::istringstream in{std::string(text)};
  if (source_version.empty()) source_version = "sha256:" + sha256_hex(text);
  return parse(in, std::move(source_version));
}

SuffixRuleSet SuffixRuleSet::parse(std::istream& in, std::string source_version) {
  SuffixRuleSet set;
  set.source_version_ = std::move(source_version);
  std::string line;
  while (std::getline(in, line)) {
    // A rule is the first whitespace-delimited token; "//" starts a comment.
    std::string rule = trim(line);
    if (rule.empty() || rule.starts_with("//")) continue;
    if (auto sp = rule.find_first_of(" \t"); sp != std::string::npos) rule.resize(sp);

    bool exception = false;
    bool wildcard = false;
    if (rule.starts_with('!')) {
      exception = true;
      rule.erase(0, 1);
    } else if (rule.starts_with("*.")) {
      wildcard = true;
      rule.erase(0, 2);
    }
    auto ascii = to_ascii_host(rule);
    if (!ascii || ascii->empty()) continue;
    if (exception) {
      set.exception_.insert(*ascii);
    } else if (wildcard) {
      set.wildcard_.insert(*ascii);
    } else {
      set.plain_.insert(*ascii);
    }
  }
  if (set.size() == 0) throw Error(Errc::UnparseableFile, "suffix rule set is empty");
  return set;
}

std::string SuffixRuleSet::public_suffix(std::string_view host) const {
  // Walk candidate suffixes from longest to shortest; the first hit is the
  // prevailing rule because exception rules always outrank what they except.
  std::size_t pos = 0;
  while (true) {
    const std::string candidate(host.substr(pos));
    if (exception_.contains(candidate)) {
      const auto dot = candidate.find('.');
      return dot == std::string::npos ? std::string() : candidate.substr(dot + 1);
    }
    if (plain_.contains(candidate)) return candidate;
    const auto dot = candidate.find('.');
    if (dot != std::string::npos && wildcard_.contains(candidate.substr(dot + 1))) return candidate;
    if (dot == std::string::npos) return candidate;  // implicit "*" rule
    pos += dot + 1;
  }
}

std::string canonical_host(std::string_view host) {
  std::string h = trim(host);
  if (!h.empty() && h.back() == '.') h.pop_back();
  if (h.empty() || h.size() > 253) throw Error(Errc::InvalidHostname, "bad hostname '" + std::string(host) + "'");
  auto ascii = to_ascii_host(h);
  if (!ascii) throw Error(Errc::InvalidHostname, "bad hostname '" + std::string(host) + "'");
  std::size_t start = 0;
  while (true) {
    const auto dot = ascii->find('.', start);
    const auto label = std::string_view(*ascii).substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!valid_label(label)) throw Error(Errc::InvalidHostname, "bad hostname '" + std::string(host) + "'");
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return *ascii;
}

bool is_ip_literal(std::string_view host) {
  std::string h(host);
  if (h.size() >= 2 && h.front() == '[' && h.back() == ']') h = h.substr(1, h.size() - 2);
  unsigned char buf[16];
  return inet_pton(AF_INET, h.c_str(), buf) == 1 || inet_pton(AF_INET6, h.c_str(), buf) == 1;
}

PayLevelDomain extract_pld(std::string_view host, const SuffixRuleSet& rules) {
  const std::string h = canonical_host(host);
  const std::string suffix = rules.public_suffix(h);
  if (suffix.size() >= h.size()) {
    throw Error(Errc::NoRegistrableDomain, "'" + h + "' is a public suffix");
  }
  // h ends with "." + suffix; keep exactly one more label.
  const std::size_t head_end = h.size() - suffix.size() - 1;
  const auto label_start = h.rfind('.', head_end == 0 ? 0 : head_end - 1);
  const std::size_t begin = (label_start == std::string::npos || label_start >= head_end) ? 0 : label_start + 1;
  return PayLevelDomain{h.substr(begin), suffix};
}

PayLevelDomain normalize_entry(std::string_view entry, const SuffixRuleSet& rules) {
  std::string s = trim(entry);
  if (s.empty()) throw Error(Errc::InvalidHostname, "empty entry");
  if (auto scheme = s.find("://"); scheme != std::string::npos) s.erase(0, scheme + 3);
  if (auto cut = s.find_first_of("/?#"); cut != std::string::npos) s.resize(cut);
  if (auto at = s.rfind('@'); at != std::string::npos) s.erase(0, at + 1);
  if (!s.empty() && s.front() == '[') {
    const auto close = s.find(']');
    const std::string inner = s.substr(0, close == std::string::npos ? s.size() : close + 1);
    if (is_ip_literal(inner)) throw Error(Errc::IPAddressEntry, "'" + std::string(entry) + "' is an IP address");
    throw Error(Errc::InvalidHostname, "bad entry '" + std::string(entry) + "'");
  }
  if (is_ip_literal(s)) throw Error(Errc::IPAddressEntry, "'" + std::string(entry) + "' is an IP address");
  if (auto colon = s.rfind(':'); colon != std::string::npos) s.resize(colon);
  if (is_ip_literal(s)) throw Error(Errc::IPAddressEntry, "'" + std::string(entry) + "' is an IP address");
  return extract_pld(s, rules);
}

}  // namespace dh::pld
