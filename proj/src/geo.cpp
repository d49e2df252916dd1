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

#include "domainharvester/geo.hpp"

#include <arpa/inet.h>

#include <fstream>
#include <sstream>

#include "domainharvester/error.hpp"

namespace dh::dns {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_address(const std::string& text, std::array<std::uint8_t, 16>& out, bool& v6) {
  out.fill(0);
  if (inet_pton(AF_INET, text.c_str(), out.data()) == 1) {
    v6 = false;
    return true;
  }
  if (inet_pton(AF_INET6, text.c_str(), out.data()) == 1) {
    v6 = true;
    return true;
  }
  return false;
}

bool prefix_match(const std::array<std::uint8_t, 16>& a, const std::array<std::uint8_t, 16>& b, int bits) {
  int i = 0;
  for (; bits >= 8; bits -= 8, ++i) {
    if (a[static_cast<std::size_t>(i)] != b[static_cast<std::size_t>(i)]) return false;
  }
  if (bits == 0) return true;
  const auto mask = static_cast<std::uint8_t>(0xFF << (8 - bits));
  return (a[static_cast<std::size_t>(i)] & mask) == (b[static_cast<std::size_t>(i)] & mask);
}

}  // namespace

FileGeoProvider FileGeoProvider::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read geo table " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

FileGeoProvider FileGeoProvider::parse(std::string_view text) {
  FileGeoProvider out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto c1 = t.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : t.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw Error(Errc::UnparseableFile, "geo table line " + std::to_string(lineno) + ": expected cidr,country,org");
    }
    const auto cidr = trim(t.substr(0, c1));
    Entry e;
    e.info.country = trim(t.substr(c1 + 1, c2 - c1 - 1));
    e.info.organization = trim(t.substr(c2 + 1));
    const auto slash = cidr.find('/');
    const auto addr = cidr.substr(0, slash);
    if (!parse_address(addr, e.prefix, e.v6)) {
      throw Error(Errc::UnparseableFile, "geo table line " + std::to_string(lineno) + ": bad address " + addr);
    }
    const int max_bits = e.v6 ? 128 : 32;
    e.bits = max_bits;
    if (slash != std::string::npos) {
      try {
        e.bits = std::stoi(cidr.substr(slash + 1));
      } catch (const std::exception&) {
        e.bits = -1;
      }
    }
    if (e.bits < 0 || e.bits > max_bits) {
      throw Error(Errc::UnparseableFile, "geo table line " + std::to_string(lineno) + ": bad prefix length");
    }
    out.entries_.push_back(std::move(e));
  }
  return out;
}

GeoInfo FileGeoProvider::lookup(const std::string& address) const {
  std::array<std::uint8_t, 16> a{};
  bool v6 = false;
  if (!parse_address(address, a, v6)) return {};
  const Entry* best = nullptr;
  for (const auto& e : entries_) {
    if (e.v6 != v6 || !prefix_match(a, e.prefix, e.bits)) continue;
    if (!best || e.bits > best->bits) best = &e;
  }
  return best ? best->info : GeoInfo{};
}

}  // namespace dh::dns
