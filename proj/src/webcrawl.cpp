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

#include "domainharvester/webcrawl.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <tuple>

#include "domainharvester/error.hpp"
#include "domainharvester/html.hpp"
#include "domainharvester/politeness.hpp"
#include "domainharvester/robots.hpp"

namespace dh::web {

std::string_view to_string(FetchError e) {
  switch (e) {
    case FetchError::None: return "none";
    case FetchError::ConnectionError: return "connection_error";
    case FetchError::TlsError: return "tls_error";
    case FetchError::Timeout: return "timeout";
    case FetchError::TooManyRedirects: return "too_many_redirects";
    case FetchError::RobotsDisallowed: return "robots_disallowed";
    case FetchError::InvalidUrl: return "invalid_url";
  }
  return "none";
}

FetchError fetch_error_from_string(std::string_view s) {
  for (auto e : {FetchError::None, FetchError::ConnectionError, FetchError::TlsError, FetchError::Timeout,
                 FetchError::TooManyRedirects, FetchError::RobotsDisallowed, FetchError::InvalidUrl}) {
    if (to_string(e) == s) return e;
  }
  throw Error(Errc::CorruptArtifact, "unknown fetch error '" + std::string(s) + "'");
}

std::string_view to_string(LinkAction a) {
  switch (a) {
    case LinkAction::FollowAndExtract: return "FollowAndExtract";
    case LinkAction::FetchOnce: return "FetchOnce";
    case LinkAction::Skip: return "Skip";
  }
  return "Skip";
}

SeedList SeedList::parse(std::string_view text, std::string name, const pld::SuffixRuleSet& rules) {
  SeedList list;
  list.name = std::move(name);
  std::istringstream in{std::string(text)};
  std::string line;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string entry = line.substr(b, e - b + 1);
    auto url = parse_url(entry);
    if (!url || pld::is_ip_literal(url->host)) {
      throw Error(Errc::InvalidSeedList, "line " + std::to_string(lineno) + ": not an absolute http(s) URL: " + entry);
    }
    pld::PayLevelDomain p;
    try {
      p = pld::extract_pld(url->host, rules);
    } catch (const Error& err) {
      throw Error(Errc::InvalidSeedList, "line " + std::to_string(lineno) + ": " + err.what());
    }
    if (!seen.insert(p.name).second) {
      throw Error(Errc::InvalidSeedList, "line " + std::to_string(lineno) + ": duplicate seed PLD " + p.name);
    }
    list.urls.push_back(url->to_string());
    list.plds.push_back(p.name);
  }
  if (list.urls.empty()) throw Error(Errc::InvalidSeedList, "seed list is empty");
  return list;
}

SeedList SeedList::load(const std::filesystem::path& path, std::string name, const pld::SuffixRuleSet& rules) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidSeedList, "cannot read seed list " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), std::move(name), rules);
}

void CrawlPolicy::validate() const {
  if (max_depth < 0) throw Error(Errc::ConfigError, "max_depth must be >= 0");
  if (politeness && min_host_interval < Duration{3000}) {
    throw Error(Errc::ConfigError, "min_host_interval must be >= 3 s while politeness is enabled");
  }
  if (per_seed_page_budget <= 0) throw Error(Errc::ConfigError, "per_seed_page_budget must be positive");
  if (max_redirects < 0) throw Error(Errc::ConfigError, "max_redirects must be >= 0");
  if (user_agent.empty()) throw Error(Errc::ConfigError, "user_agent must not be empty");
}

LinkAction classify_link(const pld::PayLevelDomain& seed, const pld::PayLevelDomain& link, int current_depth,
                         const CrawlPolicy& policy) {
  if (seed.name != link.name) return LinkAction::FetchOnce;
  return current_depth + 1 <= policy.max_depth ? LinkAction::FollowAndExtract : LinkAction::Skip;
}

namespace {

struct Task {
  std::uint64_t seq = 0;
  std::size_t seed = 0;
  Url url;
  int depth = 0;
  bool external = false;
  std::string link_pld;
};

struct RawLink {
  std::size_t seed;
  std::string source_url;
  std::string link_pld;
  std::string text;
};

struct FetchOutcome {
  Url final_url;
  FetchResponse response;
  TimePoint at{};
  bool fetched = false;
};

bool is_html(const std::string& content_type) {
  return content_type.empty() || content_type.find("html") != std::string::npos;
}

class Crawler {
 public:
  Crawler(const SeedList& seeds, const CrawlPolicy& policy, Fetcher& fetcher, Clock& clock,
          const pld::SuffixRuleSet& rules)
      : seeds_(seeds),
        policy_(policy),
        fetcher_(fetcher),
        clock_(clock),
        rules_(rules),
        scheduler_(policy.politeness ? policy.min_host_interval : Duration{0}),
        scope_(seeds.urls.size()),
        visited_(seeds.urls.size()),
        budget_used_(seeds.urls.size(), 0) {}

  WebCrawlResult run(std::uint64_t iteration_id) {
    result_.seed_list = seeds_.name;
    result_.iteration_id = iteration_id;
    for (std::size_t i = 0; i < seeds_.urls.size(); ++i) {
      scope_[i].insert(seeds_.plds[i]);
      seed_plds_.insert(seeds_.plds[i]);
      handled_external_.insert(seeds_.plds[i]);
      result_.per_seed[seeds_.plds[i]];
      auto url = parse_url(seeds_.urls[i]);
      visited_[i].insert(url->to_string());
      ++budget_used_[i];
      enqueue(Task{0, i, *url, 0, false, seeds_.plds[i]});
    }
    while (!ready_.empty()) {
      auto key = *ready_.begin();
      ready_.erase(ready_.begin());
      const std::string host = std::get<2>(key);
      auto& queue = queues_[host];
      Task task = std::move(queue.front());
      queue.pop_front();
      if (task.external) {
        process_external(task);
      } else {
        process_internal(task);
      }
      if (!queue.empty()) push_ready(host);
    }
    finalize();
    return std::move(result_);
  }

 private:
  using ReadyKey = std::tuple<TimePoint, std::uint64_t, std::string>;

  void enqueue(Task task) {
    task.seq = next_seq_++;
    auto& queue = queues_[task.url.host];
    const bool was_empty = queue.empty();
    const std::string host = task.url.host;
    queue.push_back(std::move(task));
    if (was_empty) push_ready(host);
  }

  void push_ready(const std::string& host) {
    // Keys use the reservation horizon, not the current time, so selection
    // order is identical under real and simulated clocks.
    const TimePoint ready = scheduler_.next_available(host, TimePoint{});
    ready_.emplace(ready, queues_[host].front().seq, host);
  }

  TimePoint wait_turn(const std::string& host) {
    const TimePoint slot = scheduler_.reserve(host, clock_.now());
    clock_.sleep_until(slot);
    return clock_.now();
  }

  const RobotsRules& robots_for(const Url& url) {
    const std::string origin = url.origin();
    auto it = robots_.find(origin);
    if (it != robots_.end()) return it->second;
    RobotsRules rules = RobotsRules::allow_all();
    Url robots_url = url;
    robots_url.path = "/robots.txt";
    robots_url.query.clear();
    const TimePoint at = wait_turn(url.host);
    FetchResponse resp = fetcher_.fetch(robots_url, at);
    // Unreachable or 4xx robots.txt means no restrictions.
    if (resp.status.error == FetchError::None && resp.status.http_status >= 200 && resp.status.http_status < 300) {
      rules = RobotsRules::parse(resp.body, policy_.user_agent);
    }
    return robots_.emplace(origin, std::move(rules)).first->second;
  }

  bool robots_allow(const Url& url) { return !policy_.respect_robots || robots_for(url).allowed(url.path_and_query()); }

  // Fetches with manual redirect following so every hop is spaced and
  // robots-checked like any other request.
  FetchOutcome fetch_following(const Url& start) {
    FetchOutcome out;
    out.final_url = start;
    for (int hop = 0;; ++hop) {
      if (!robots_allow(out.final_url)) {
        out.response = FetchResponse{};
        out.response.status.error = FetchError::RobotsDisallowed;
        out.at = clock_.now();
        return out;
      }
      out.at = wait_turn(out.final_url.host);
      out.response = fetcher_.fetch(out.final_url, out.at);
      out.fetched = true;
      const int code = out.response.status.http_status;
      const bool redirect = out.response.status.error == FetchError::None && code >= 300 && code < 400 &&
                            code != 304 && !out.response.location.empty();
      if (!redirect) return out;
      if (hop >= policy_.max_redirects) {
        out.response.status.error = FetchError::TooManyRedirects;
        return out;
      }
      auto next = resolve_url(out.final_url, out.response.location);
      if (!next || pld::is_ip_literal(next->host)) {
        out.response.status.error = FetchError::InvalidUrl;
        return out;
      }
      out.final_url = *next;
    }
  }

  std::optional<std::string> pld_of(const std::string& host) {
    if (pld::is_ip_literal(host)) return std::nullopt;
    try {
      return pld::extract_pld(host, rules_).name;
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  PageObservation observe(const Task& task, const FetchOutcome& outcome, HtmlSummary* summary_out) {
    PageObservation obs;
    obs.url = task.url.to_string();
    obs.final_url = outcome.final_url.to_string();
    obs.depth = task.depth;
    obs.external = task.external;
    obs.status = outcome.response.status;
    obs.certificate = outcome.response.certificate;
    obs.fetched_at = outcome.at;
    if (obs.status.ok() && is_html(outcome.response.content_type)) {
      HtmlSummary summary = parse_html(outcome.response.body);
      obs.title = summary.title;
      obs.content.word_count = summary.word_count;
      obs.content.ad_frame_count = summary.ad_frame_count;
      obs.content.text_excerpt = truncate_utf8(summary.body_text, 2048);
      if (summary_out) *summary_out = std::move(summary);
    }
    return obs;
  }

  void process_internal(const Task& task) {
    const std::string& seed_pld = seeds_.plds[task.seed];
    FetchOutcome outcome = fetch_following(task.url);
    HtmlSummary summary;
    PageObservation obs = observe(task, outcome, &summary);

    const auto final_pld = pld_of(outcome.final_url.host);
    bool in_scope = final_pld && scope_[task.seed].contains(*final_pld);
    if (task.depth == 0 && final_pld && !in_scope && obs.status.ok()) {
      // A seed landing page that redirects to a sibling domain keeps its
      // extraction scope; the sibling becomes part of the seed's scope.
      scope_[task.seed].insert(*final_pld);
      handled_external_.insert(*final_pld);
      in_scope = true;
    }
    if (task.depth == 0) seed_landing_[task.seed] = obs;

    if (obs.status.ok() && in_scope) {
      for (const auto& anchor : summary.anchors) {
        auto target = resolve_url(outcome.final_url, anchor.href);
        if (!target) continue;
        const auto link_pld = pld_of(target->host);
        if (!link_pld) continue;
        obs.outlinks.push_back({target->to_string(), anchor.text});
        const pld::PayLevelDomain seed_p{scope_[task.seed].contains(*link_pld) ? *link_pld : seed_pld, {}};
        const LinkAction action = classify_link(seed_p, pld::PayLevelDomain{*link_pld, {}}, task.depth, policy_);
        if (action == LinkAction::FollowAndExtract) {
          const std::string key = target->to_string();
          if (budget_used_[task.seed] < policy_.per_seed_page_budget && visited_[task.seed].insert(key).second) {
            ++budget_used_[task.seed];
            enqueue(Task{0, task.seed, *target, task.depth + 1, false, seed_pld});
          }
        } else if (action == LinkAction::FetchOnce) {
          raw_links_.push_back({task.seed, obs.final_url, *link_pld, anchor.text});
          if (handled_external_.insert(*link_pld).second) {
            enqueue(Task{0, task.seed, *target, task.depth + 1, true, *link_pld});
          }
        }
      }
      internal_pages_[task.seed].push_back(obs);
    }
    result_.per_seed[seed_pld].push_back(std::move(obs));
  }

  void process_external(const Task& task) {
    const std::string& seed_pld = seeds_.plds[task.seed];
    FetchOutcome outcome = fetch_following(task.url);
    PageObservation obs = observe(task, outcome, nullptr);
    std::string identity = task.link_pld;
    if (outcome.fetched) {
      if (auto final_pld = pld_of(outcome.final_url.host)) identity = *final_pld;
    }
    if (identity != task.link_pld) {
      alias_[task.link_pld] = identity;
      handled_external_.insert(identity);
    }
    auto [it, inserted] = result_.discovered.try_emplace(identity);
    DomainWebRecord& rec = it->second;
    if (inserted && !seed_plds_.contains(identity)) {
      rec.pld = identity;
      rec.landing_url = obs.final_url;
      rec.access = obs.status;
      rec.via_https = outcome.final_url.scheme == "https";
      rec.certificate = obs.certificate;
      rec.fetched_at = obs.fetched_at;
      rec.landing = obs.content;
      if (obs.status.ok()) rec.titles.push_back({obs.final_url, obs.title});
    }
    if (identity != task.link_pld &&
        std::find(rec.aliases.begin(), rec.aliases.end(), task.link_pld) == rec.aliases.end()) {
      rec.aliases.push_back(task.link_pld);
    }
    result_.per_seed[seed_pld].push_back(std::move(obs));
  }

  void finalize() {
    for (std::size_t i = 0; i < seeds_.urls.size(); ++i) {
      const std::string& p = seeds_.plds[i];
      DomainWebRecord& rec = result_.discovered[p];
      rec.pld = p;
      rec.is_seed = true;
      rec.titles.clear();
      auto landing = seed_landing_.find(i);
      if (landing != seed_landing_.end()) {
        const PageObservation& obs = landing->second;
        rec.landing_url = obs.final_url;
        rec.access = obs.status;
        rec.via_https = obs.final_url.starts_with("https://");
        rec.certificate = obs.certificate;
        rec.fetched_at = obs.fetched_at;
        rec.landing = obs.content;
        if (!obs.status.ok()) result_.unreachable_seeds.push_back(p);
      }
      for (const auto& page : internal_pages_[i]) rec.titles.push_back({page.final_url, page.title});
    }
    for (const auto& link : raw_links_) {
      const std::string& source = seeds_.plds[link.seed];
      auto a = alias_.find(link.link_pld);
      const std::string target = a == alias_.end() ? link.link_pld : a->second;
      if (target == source || scope_[link.seed].contains(target)) continue;
      DomainWebRecord& rec = result_.discovered[target];
      if (rec.pld.empty()) rec.pld = target;
      ++rec.backlinks[source];
      rec.link_texts.push_back({link.source_url, link.text});
    }
    for (auto& [name, rec] : result_.discovered) {
      std::sort(rec.titles.begin(), rec.titles.end());
      rec.titles.erase(std::unique(rec.titles.begin(), rec.titles.end()), rec.titles.end());
      std::sort(rec.link_texts.begin(), rec.link_texts.end());
      std::sort(rec.aliases.begin(), rec.aliases.end());
    }
    std::sort(result_.unreachable_seeds.begin(), result_.unreachable_seeds.end());
  }

  const SeedList& seeds_;
  const CrawlPolicy& policy_;
  Fetcher& fetcher_;
  Clock& clock_;
  const pld::SuffixRuleSet& rules_;
  PolitenessScheduler scheduler_;

  WebCrawlResult result_;
  std::uint64_t next_seq_ = 0;
  std::map<std::string, std::deque<Task>> queues_;
  std::set<ReadyKey> ready_;
  std::map<std::string, RobotsRules> robots_;
  std::vector<std::set<std::string>> scope_;
  std::vector<std::set<std::string>> visited_;
  std::vector<int> budget_used_;
  std::set<std::string> seed_plds_;
  std::set<std::string> handled_external_;
  std::map<std::string, std::string> alias_;
  std::vector<RawLink> raw_links_;
  std::map<std::size_t, PageObservation> seed_landing_;
  std::map<std::size_t, std::vector<PageObservation>> internal_pages_;
};

}  // namespace

WebCrawlResult crawl_seed_list(const SeedList& seeds, const CrawlPolicy& policy, Fetcher& fetcher, Clock& clock,
                               const pld::SuffixRuleSet& rules, std::uint64_t iteration_id) {
  policy.validate();
  return Crawler(seeds, policy, fetcher, clock, rules).run(iteration_id);
}

std::map<std::string, std::set<std::string>> record_backlinks(const WebCrawlResult& result) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [name, rec] : result.discovered) {
    auto& sources = out[name];
    for (const auto& [source, count] : rec.backlinks) {
      if (source != name && count > 0) sources.insert(source);
    }
  }
  return out;
}

}  // namespace dh::web
