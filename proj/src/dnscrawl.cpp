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

#include "domainharvester/dnscrawl.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "domainharvester/error.hpp"

namespace dh::dns {
namespace {

struct Tally {
  std::atomic<std::size_t> queries{0};
  std::atomic<std::size_t> timeouts{0};
};

QueryResult query_with_retry(Resolver& resolver, const std::string& name, RrType type, int retries, Tally* tally) {
  QueryResult r;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    r = resolver.query(name, type);
    if (r.rcode != Rcode::Timeout && r.rcode != Rcode::ServFail) break;
  }
  if (tally) {
    ++tally->queries;
    if (r.rcode == Rcode::Timeout) ++tally->timeouts;
  }
  return r;
}

bool has_txt_prefix(const QueryResult& r, std::string_view prefix) {
  return std::any_of(r.answers.begin(), r.answers.end(),
                     [&](const ResourceRecord& rr) { return rr.data.rfind(prefix, 0) == 0; });
}

// Runs one probe; timeouts count as absent.
template <typename Check>
bool probe(Resolver& resolver, const std::string& name, RrType type, const DnsCrawlConfig& config, Check check) {
  const auto r = query_with_retry(resolver, name, type, config.retries, nullptr);
  if (r.rcode == Rcode::Timeout) {
    spdlog::warn("dns probe {} {} timed out", name, to_string(type));
    return false;
  }
  return r.rcode == Rcode::NoError && check(r);
}

SecurityMechanisms probe_impl(const std::string& pld, Resolver& resolver, const DnsCrawlConfig& config) {
  SecurityMechanisms s;
  auto any = [](const QueryResult& r) { return !r.answers.empty(); };
  s.dnssec = probe(resolver, pld, RrType::DNSKEY, config,
                   [](const QueryResult& r) { return !r.answers.empty() && r.authenticated_data; });
  s.caa = probe(resolver, pld, RrType::CAA, config, any);
  s.spf = probe(resolver, pld, RrType::TXT, config, [](const QueryResult& r) { return has_txt_prefix(r, "v=spf1"); });
  for (const auto& sel : config.dkim_selectors) {
    if (probe(resolver, sel + "._domainkey." + pld, RrType::TXT, config, any)) {
      s.dkim = true;
      break;
    }
  }
  s.dmarc = probe(resolver, "_dmarc." + pld, RrType::TXT, config,
                  [](const QueryResult& r) { return has_txt_prefix(r, "v=DMARC1"); });
  s.mta_sts = probe(resolver, "_mta-sts." + pld, RrType::TXT, config,
                    [](const QueryResult& r) { return has_txt_prefix(r, "v=STSv1"); });
  s.dane = probe(resolver, "_443._tcp." + pld, RrType::TLSA, config, any);
  return s;
}

DnsSnapshotEntry crawl_impl(const std::string& pld, Resolver& resolver, const GeoProvider& geo, Clock& clock,
                            const DnsCrawlConfig& config, Tally* tally) {
  DnsSnapshotEntry e;
  e.pld = pld;
  e.queried_at = clock.now();
  for (auto type : kCollectedTypes) {
    const auto r = query_with_retry(resolver, pld, type, config.retries, tally);
    const std::string key(to_string(type));
    e.rcodes[key] = r.rcode;
    if (r.rcode != Rcode::NoError) continue;
    std::vector<std::string> values;
    for (const auto& rr : r.answers) values.push_back(rr.data);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (!values.empty()) e.records[key] = std::move(values);
  }
  for (const auto& a : e.values(RrType::A)) e.a_geo.push_back(geo.lookup(a));
  for (const auto& a : e.values(RrType::AAAA)) e.aaaa_geo.push_back(geo.lookup(a));
  e.security = probe_impl(pld, resolver, config);
  return e;
}

}  // namespace

const std::vector<std::string>& DnsSnapshotEntry::values(RrType t) const {
  static const std::vector<std::string> kEmpty;
  auto it = records.find(std::string(to_string(t)));
  return it == records.end() ? kEmpty : it->second;
}

bool DnsSnapshotEntry::nxdomain() const {
  return std::any_of(rcodes.begin(), rcodes.end(), [](const auto& kv) { return kv.second == Rcode::NXDomain; });
}

SecurityMechanisms probe_security(const std::string& pld, Resolver& resolver, const DnsCrawlConfig& config) {
  return probe_impl(pld, resolver, config);
}

DnsSnapshotEntry crawl_domain(const std::string& pld, Resolver& resolver, const GeoProvider& geo, Clock& clock,
                              const DnsCrawlConfig& config) {
  return crawl_impl(pld, resolver, geo, clock, config, nullptr);
}

std::map<std::string, DnsSnapshotEntry> crawl_dns(const std::set<std::string>& plds, Resolver& resolver,
                                                  const GeoProvider& geo, Clock& clock, const DnsCrawlConfig& config) {
  if (plds.empty()) throw Error(Errc::InvalidArgument, "crawl_dns: empty PLD set");
  if (config.max_in_flight == 0) throw Error(Errc::ConfigError, "dns max_in_flight must be positive");

  const std::vector<std::string> work(plds.begin(), plds.end());
  std::vector<DnsSnapshotEntry> results(work.size());
  Tally tally;
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;

  auto worker = [&] {
    while (true) {
      const auto i = next.fetch_add(1);
      if (i >= work.size()) return;
      try {
        results[i] = crawl_impl(work[i], resolver, geo, clock, config, &tally);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  const auto n_threads = std::min(config.max_in_flight, work.size());
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (err) std::rethrow_exception(err);

  if (tally.queries > 0 && tally.timeouts == tally.queries) {
    throw Error(Errc::ResolverUnavailable, "every DNS query timed out");
  }
  std::map<std::string, DnsSnapshotEntry> out;
  for (std::size_t i = 0; i < work.size(); ++i) out.emplace(work[i], std::move(results[i]));
  return out;
}

}  // namespace dh::dns
