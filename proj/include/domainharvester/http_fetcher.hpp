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

#include <map>
#include <string>

#include "domainharvester/webcrawl.hpp"

namespace dh::web {

struct Endpoint {
  std::string address;  // IP literal to connect to
  int port = 0;
};

struct HttpFetcherConfig {
  std::string user_agent = CrawlPolicy{}.user_agent;
  Duration timeout{10000};
  std::size_t max_body_bytes = 2 * 1024 * 1024;
  // Connection overrides keyed "scheme://host" or "scheme://*"; the Host
  // header and TLS SNI still carry the original host name.
  std::map<std::string, Endpoint> overrides;
  // Extra trust anchors (PEM) on top of, or instead of, the system store.
  std::string extra_ca_pem;
  bool use_system_trust = true;
};

// Real network fetcher over HTTP/1.1 and TLS. Captures the server's leaf
// certificate and whether its chain validated at the (clock-provided) fetch
// time, while still reading the page when validation fails.
class HttpFetcher final : public Fetcher {
 public:
  explicit HttpFetcher(HttpFetcherConfig config);
  FetchResponse fetch(const Url& url, TimePoint at) override;

 private:
  HttpFetcherConfig config_;
};

}  // namespace dh::web
