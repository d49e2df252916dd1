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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "domainharvester/clock.hpp"
#include "domainharvester/http_fetcher.hpp"
#include "domainharvester/labeling.hpp"
#include "domainharvester/resolver.hpp"

namespace dh::fixture {

struct Link {
  std::string href;
  std::string text;
};

struct PageSpec {
  std::string path = "/";
  std::string title;
  std::string body;
  std::vector<Link> links;
  int ad_frames = 0;
};

struct CertSpec {
  std::string issuer_org = "Fixture Trust";
  std::string issuer_country = "US";
  std::string subject_org;
  std::string subject_country;
};

struct ExtraRecord {
  std::string name;  // relative to the domain, "@" for the apex
  dns::RrType type = dns::RrType::TXT;
  std::string data;
};

struct DomainSpec {
  std::string name;
  bool seed = false;
  bool https = false;
  std::vector<PageSpec> pages;
  std::string robots;
  CertSpec cert;
  std::map<std::string, std::vector<std::string>> dns;  // "NS", "A", "AAAA", "MX", "TXT"
  std::vector<ExtraRecord> extra;
  bool dnssec = false;

  std::string origin() const { return (https ? "https://" : "http://") + name; }
};

enum class MutationKind { ChangeNs, Nxdomain, ExpireCert, BreakAccess, RemoveLinks, Park };

std::string_view to_string(MutationKind k);

struct Mutation {
  int iteration = 2;
  MutationKind kind = MutationKind::ChangeNs;
  std::string domain;
  std::vector<std::string> ns;    // ChangeNs
  int status = 503;               // BreakAccess
  bool refuse = false;            // BreakAccess: connection refused instead of a status
  std::vector<std::string> from;  // RemoveLinks: seed domains that drop their links
  std::string mode = "content";   // Park: "content" | "ns"
};

struct WorldScript {
  std::string name;
  std::string seed_list = "fixture";
  TimePoint start{};
  int iterations = 1;
  std::vector<DomainSpec> domains;
  std::vector<std::string> geo;  // "cidr,country,organization"
  std::vector<Mutation> mutations;
  std::string parking_provider = "parking-example.net";

  // Throws InvalidWorldScript.
  static WorldScript parse(std::string_view json_text);
  static WorldScript load(const std::filesystem::path& path);
  void validate() const;

  // Iterations are numbered from 1, seven days apart.
  TimePoint date_of(int iteration) const;
  const DomainSpec* find(const std::string& domain) const;
  std::vector<std::string> seed_urls() const;
  std::string geo_csv() const;
  std::string parking_providers() const { return parking_provider + "\n"; }
};

// Scripted state of one domain at one iteration, mutations applied
// cumulatively.
struct DomainState {
  DomainSpec spec;
  bool nxdomain = false;
  bool cert_expired = false;
  int forced_status = 0;
  bool refused = false;
  bool parked_content = false;
  bool parked_ns = false;
};

std::map<std::string, DomainState> world_state(const WorldScript& script, int iteration);

// Domains discovered by a crawl of the state: seeds plus everything a seed page links to.
std::set<std::string> discovered(const WorldScript& script, int iteration);

// Distinct linking seeds per domain, excluding self-links.
std::map<std::string, std::size_t> backlink_counts(const WorldScript& script, int iteration);

// Category implied by each mutation scheduled for exactly this iteration.
std::map<std::string, labeling::Category> mutation_manifest(const WorldScript& script, int iteration);

// Labels computed from scripted state alone, with the rule order of the
// labeler. Iteration must be >= 2.
std::map<std::string, labeling::Category> expected_labels(const WorldScript& script, int iteration,
                                                          double drop_ratio = 0.5);

dns::Zone build_zone(const WorldScript& script, int iteration);

class RunningWorld {
 public:
  virtual ~RunningWorld() = default;
  virtual int http_port() const = 0;
  virtual int dns_port() const = 0;
  // Fetcher overrides: "http://*" plus one "https://<domain>" per HTTPS domain.
  virtual std::map<std::string, web::Endpoint> endpoints() const = 0;
  // PEM of every issuing authority in the world.
  virtual const std::string& ca_pem() const = 0;
  virtual std::size_t requests_served() const = 0;
  virtual void stop() = 0;
};

// Binds HTTP, HTTPS and DNS on 127.0.0.1 ephemeral ports. Throws
// PortUnavailable.
std::unique_ptr<RunningWorld> serve_world(const WorldScript& script, int iteration);

struct GeneratedWorldOptions {
  std::size_t seeds = 5;
  std::size_t externals = 120;
  std::size_t mutations_per_kind = 3;  // spread over iteration 2
  double risky_fraction = 0.3;
  int iterations = 3;
  std::uint64_t seed = 7;
  std::string start_date = "2022-11-11";
};

// A larger random world whose iteration-2 labels give a trainable PU set.
WorldScript generate_world(const GeneratedWorldOptions& options);

std::string to_json_text(const WorldScript& script);

// Writes seeds, geo table, parking providers and CA bundle for a running
// world under dir and returns a pipeline config document pointing at them,
// with the clock pinned to the iteration's date.
Json pipeline_config(const WorldScript& script, const RunningWorld& world, int iteration,
                     const std::filesystem::path& dir);

}  // namespace dh::fixture
