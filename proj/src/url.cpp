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

#include "domainharvester/url.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "domainharvester/error.hpp"
#include "domainharvester/pld.hpp"

namespace dh::web {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim_ws(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && static_cast<unsigned char>(s[b]) <= ' ') ++b;
  while (e > b && static_cast<unsigned char>(s[e - 1]) <= ' ') --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    if (s[i] != '\t' && s[i] != '\n' && s[i] != '\r') out.push_back(s[i]);
  }
  return out;
}

std::string remove_dot_segments(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const bool absolute = !path.empty() && path[0] == '/';
  if (absolute) i = 1;
  bool trailing_slash = false;
  while (i <= path.size()) {
    auto slash = path.find('/', i);
    if (slash == std::string_view::npos) slash = path.size();
    const auto seg = path.substr(i, slash - i);
    trailing_slash = false;
    if (seg == ".") {
      trailing_slash = true;
    } else if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing_slash = true;
    } else {
      out.emplace_back(seg);
    }
    if (slash == path.size()) break;
    i = slash + 1;
  }
  std::string result = "/";
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k) result += '/';
    result += out[k];
  }
  if (trailing_slash && result.back() != '/') result += '/';
  return result;
}

}  // namespace

std::string Url::origin() const {
  std::string out = scheme + "://" + host;
  if (port != 0 && port != (scheme == "https" ? 443 : 80)) out += ":" + std::to_string(port);
  return out;
}

std::string Url::path_and_query() const { return query.empty() ? path : path + "?" + query; }

std::string Url::to_string() const { return origin() + path_and_query(); }

std::optional<Url> parse_url(std::string_view text) {
  const std::string s = trim_ws(text);
  const auto scheme_end = s.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  Url url;
  url.scheme = lower(std::string_view(s).substr(0, scheme_end));
  if (url.scheme != "http" && url.scheme != "https") return std::nullopt;

  std::size_t auth_begin = scheme_end + 3;
  std::size_t auth_end = s.find_first_of("/?#", auth_begin);
  if (auth_end == std::string::npos) auth_end = s.size();
  std::string authority = s.substr(auth_begin, auth_end - auth_begin);
  if (auto at = authority.rfind('@'); at != std::string::npos) authority.erase(0, at + 1);
  if (authority.empty() || authority.front() == '[') return std::nullopt;  // IPv6 literals not crawled
  if (auto colon = authority.rfind(':'); colon != std::string::npos) {
    const std::string port = authority.substr(colon + 1);
    authority.resize(colon);
    if (!port.empty()) {
      if (port.size() > 5 || !std::all_of(port.begin(), port.end(), ::isdigit)) return std::nullopt;
      url.port = std::stoi(port);
      if (url.port <= 0 || url.port > 65535) return std::nullopt;
      if (url.port == (url.scheme == "https" ? 443 : 80)) url.port = 0;
    }
  }
  try {
    url.host = pld::is_ip_literal(authority) ? authority : pld::canonical_host(authority);
  } catch (const Error&) {
    return std::nullopt;
  }

  std::string rest = s.substr(auth_end);
  if (auto hash = rest.find('#'); hash != std::string::npos) rest.resize(hash);
  if (auto q = rest.find('?'); q != std::string::npos) {
    url.query = rest.substr(q + 1);
    rest.resize(q);
  }
  url.path = rest.empty() ? "/" : remove_dot_segments(rest);
  return url;
}

std::optional<Url> resolve_url(const Url& base, std::string_view reference) {
  std::string ref = trim_ws(reference);
  if (auto hash = ref.find('#'); hash != std::string::npos) ref.resize(hash);
  if (ref.empty()) return base;

  // Scheme present?
  const auto colon = ref.find(':');
  const auto first_delim = ref.find_first_of("/?#");
  if (colon != std::string::npos && (first_delim == std::string::npos || colon < first_delim)) {
    const std::string scheme = lower(std::string_view(ref).substr(0, colon));
    if (scheme != "http" && scheme != "https") return std::nullopt;  // mailto:, javascript:, tel: ...
    return parse_url(ref);
  }
  if (ref.starts_with("//")) return parse_url(base.scheme + ":" + ref);

  Url out = base;
  out.query.clear();
  std::string path = ref;
  if (auto q = path.find('?'); q != std::string::npos) {
    out.query = path.substr(q + 1);
    path.resize(q);
    if (path.empty()) {
      out.path = base.path;
      return out;
    }
  }
  if (path.starts_with('/')) {
    out.path = remove_dot_segments(path);
  } else {
    const auto last = base.path.rfind('/');
    const std::string dir = last == std::string::npos ? "/" : base.path.substr(0, last + 1);
    out.path = remove_dot_segments(dir + path);
  }
  return out;
}

}  // namespace dh::web
