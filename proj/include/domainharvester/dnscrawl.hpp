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

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "domainharvester/clock.hpp"
#include "domainharvester/geo.hpp"
#include "domainharvester/resolver.hpp"

namespace dh::dns {

// Record types collected per PLD, in feature order.
inline constexpr std::array<RrType, 5> kCollectedTypes = {RrType::NS, RrType::A, RrType::AAAA, RrType::MX,
                                                          RrType::TXT};

struct SecurityMechanisms {
  bool dnssec = false;
  bool caa = false;
  bool spf = false;
  bool dkim = false;
  bool dmarc = false;
  bool mta_sts = false;
  bool dane = false;

  static constexpr std::array<const char*, 7> kNames = {"DNSSEC", "CAA", "SPF", "DKIM", "DMARC", "MTA-STS", "DANE"};
  std::array<bool, 7> flags() const { return {dnssec, caa, spf, dkim, dmarc, mta_sts, dane}; }

  friend bool operator==(const SecurityMechanisms&, const SecurityMechanisms&) = default;
};

struct DnsSnapshotEntry {
  std::string pld;
  std::map<std::string, std::vector<std::string>> records;  // "NS" -> sorted unique values; empty lists omitted
  std::map<std::string, Rcode> rcodes;                      // per collected type
  std::vector<GeoInfo> a_geo;                               // aligned with records["A"]
  std::vector<GeoInfo> aaaa_geo;                            // aligned with records["AAAA"]
  SecurityMechanisms security;
  TimePoint queried_at{};

  const std::vector<std::string>& values(RrType t) const;
  std::size_t count(RrType t) const { return values(t).size(); }
  bool nxdomain() const;

  friend bool operator==(const DnsSnapshotEntry&, const DnsSnapshotEntry&) = default;
};

struct DnsCrawlConfig {
  std::size_t max_in_flight = 64;
  int retries = 2;  // extra attempts on Timeout/ServFail
  std::vector<std::string> dkim_selectors = {"default", "selector1", "selector2", "google", "k1"};
};

SecurityMechanisms probe_security(const std::string& pld, Resolver& resolver, const DnsCrawlConfig& config = {});

DnsSnapshotEntry crawl_domain(const std::string& pld, Resolver& resolver, const GeoProvider& geo, Clock& clock,
                              const DnsCrawlConfig& config = {});

// Every input PLD gets an entry. Throws ResolverUnavailable when not a single
// query got an answer.
std::map<std::string, DnsSnapshotEntry> crawl_dns(const std::set<std::string>& plds, Resolver& resolver,
                                                  const GeoProvider& geo, Clock& clock,
                                                  const DnsCrawlConfig& config = {});

}  // namespace dh::dns
