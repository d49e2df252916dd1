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

#include <optional>
#include <string>
#include <string_view>

namespace dh::web {

// Absolute http(s) URL with the host in canonical ASCII form. Fragments are
// dropped at parse time: they never change what is fetched.
struct Url {
  std::string scheme;  // "http" | "https"
  std::string host;
  int port = 0;        // 0 = scheme default
  std::string path = "/";
  std::string query;   // without '?'

  int effective_port() const { return port != 0 ? port : (scheme == "https" ? 443 : 80); }
  std::string origin() const;        // scheme://host[:port]
  std::string path_and_query() const;
  std::string to_string() const;

  friend bool operator==(const Url&, const Url&) = default;
};

// nullopt for anything that is not an absolute http(s) URL with a valid host.
std::optional<Url> parse_url(std::string_view text);

// RFC 3986 reference resolution, restricted to http(s) results.
std::optional<Url> resolve_url(const Url& base, std::string_view reference);

}  // namespace dh::web
