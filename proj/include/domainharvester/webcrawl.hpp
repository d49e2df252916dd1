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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "domainharvester/clock.hpp"
#include "domainharvester/pld.hpp"
#include "domainharvester/url.hpp"

namespace dh::web {

enum class FetchError {
  None,
  ConnectionError,
  TlsError,
  Timeout,
  TooManyRedirects,
  RobotsDisallowed,
  InvalidUrl,
};

std::string_view to_string(FetchError e);
FetchError fetch_error_from_string(std::string_view s);

struct FetchStatus {
  int http_status = 0;
  FetchError error = FetchError::None;

  // Connection, TLS or timeout failure, or an HTTP error status.
  bool is_access_failure() const {
    return error == FetchError::ConnectionError || error == FetchError::TlsError || error == FetchError::Timeout ||
           http_status >= 400;
  }
  bool ok() const { return error == FetchError::None && http_status >= 200 && http_status < 300; }

  friend bool operator==(const FetchStatus&, const FetchStatus&) = default;
};

struct CertificateInfo {
  std::string issuer_organization;
  std::string issuer_country;
  std::string subject_organization;
  std::string subject_country;
  TimePoint not_before{};
  TimePoint not_after{};
  bool chain_valid_at_fetch = false;

  bool valid_at(TimePoint t) const { return not_before <= t && t <= not_after; }

  friend bool operator==(const CertificateInfo&, const CertificateInfo&) = default;
};

// Content signals kept for parking heuristics.
struct PageContent {
  std::size_t word_count = 0;
  std::size_t ad_frame_count = 0;
  std::string text_excerpt;

  friend bool operator==(const PageContent&, const PageContent&) = default;
};

struct Outlink {
  std::string url;
  std::string text;

  friend bool operator==(const Outlink&, const Outlink&) = default;
};

struct PageObservation {
  std::string url;
  std::string final_url;
  int depth = 0;
  bool external = false;
  FetchStatus status;
  std::string title;
  std::vector<Outlink> outlinks;
  std::optional<CertificateInfo> certificate;
  TimePoint fetched_at{};
  PageContent content;

  friend bool operator==(const PageObservation&, const PageObservation&) = default;
};

struct TitledPage {
  std::string url;
  std::string title;

  friend bool operator==(const TitledPage&, const TitledPage&) = default;
  friend auto operator<=>(const TitledPage&, const TitledPage&) = default;
};

struct LinkReference {
  std::string source_url;
  std::string text;

  friend bool operator==(const LinkReference&, const LinkReference&) = default;
  friend auto operator<=>(const LinkReference&, const LinkReference&) = default;
};

// Everything one crawl learned about a single pay-level domain.
struct DomainWebRecord {
  std::string pld;
  bool is_seed = false;
  std::vector<TitledPage> titles;             // sorted by url
  std::vector<LinkReference> link_texts;      // anchors on seed pages pointing here, sorted
  std::map<std::string, std::uint32_t> backlinks;  // source seed PLD -> anchor count
  std::string landing_url;
  FetchStatus access;
  bool via_https = false;
  std::optional<CertificateInfo> certificate;
  TimePoint fetched_at{};
  PageContent landing;
  std::vector<std::string> aliases;  // link PLDs that redirected here

  std::size_t backlink_count() const { return backlinks.size(); }

  friend bool operator==(const DomainWebRecord&, const DomainWebRecord&) = default;
};

struct WebCrawlResult {
  std::string seed_list;
  std::uint64_t iteration_id = 0;
  std::map<std::string, std::vector<PageObservation>> per_seed;
  std::map<std::string, DomainWebRecord> discovered;
  std::vector<std::string> unreachable_seeds;

  friend bool operator==(const WebCrawlResult&, const WebCrawlResult&) = default;
};

struct SeedList {
  std::string name;
  std::vector<std::string> urls;
  std::vector<std::string> plds;  // parallel to urls, pairwise distinct

  // One absolute http(s) URL per line, '#' comments. Throws InvalidSeedList on
  // malformed URLs or two seeds sharing a PLD.
  static SeedList parse(std::string_view text, std::string name, const pld::SuffixRuleSet& rules);
  static SeedList load(const std::filesystem::path& path, std::string name, const pld::SuffixRuleSet& rules);
};

struct CrawlPolicy {
  int max_depth = 3;
  Duration min_host_interval{3000};
  bool politeness = true;
  bool respect_robots = true;
  int per_seed_page_budget = 500;
  Duration fetch_timeout{10000};
  int max_redirects = 5;
  std::string user_agent = "DomainHarvesterBot/1.0 (+https://example.org/domainharvester-crawler)";

  // Throws ConfigError.
  void validate() const;
};

enum class LinkAction { FollowAndExtract, FetchOnce, Skip };

std::string_view to_string(LinkAction a);

LinkAction classify_link(const pld::PayLevelDomain& seed, const pld::PayLevelDomain& link, int current_depth,
                         const CrawlPolicy& policy);

// One HTTP exchange, no redirect following.
struct FetchResponse {
  FetchStatus status;
  std::string content_type;
  std::string body;
  std::string location;
  std::optional<CertificateInfo> certificate;
};

class Fetcher {
 public:
  virtual ~Fetcher() = default;
  virtual FetchResponse fetch(const Url& url, TimePoint at) = 0;
};

// Breadth-first crawl of every seed: same-PLD links are followed to
// policy.max_depth, every other PLD is fetched once per crawl. One
// orchestrator thread interleaves hosts so a cooling host never blocks others.
WebCrawlResult crawl_seed_list(const SeedList& seeds, const CrawlPolicy& policy, Fetcher& fetcher, Clock& clock,
                               const pld::SuffixRuleSet& rules, std::uint64_t iteration_id = 0);

// PLD -> distinct seed PLDs with at least one anchor to it.
std::map<std::string, std::set<std::string>> record_backlinks(const WebCrawlResult& result);

}  // namespace dh::web
