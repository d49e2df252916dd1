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
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dh::dns {

inline constexpr std::string_view kUnknownGeo = "Unknown";

struct GeoInfo {
  std::string country{kUnknownGeo};
  std::string organization{kUnknownGeo};

  friend bool operator==(const GeoInfo&, const GeoInfo&) = default;
  friend auto operator<=>(const GeoInfo&, const GeoInfo&) = default;
};

class GeoProvider {
 public:
  virtual ~GeoProvider() = default;
  // Unknown addresses map to {Unknown, Unknown}.
  virtual GeoInfo lookup(const std::string& address) const = 0;
};

class NullGeoProvider final : public GeoProvider {
 public:
  GeoInfo lookup(const std::string&) const override { return {}; }
};

// CIDR table, one "cidr,country,organization" per line, '#' comments.
// Longest matching prefix wins.
class FileGeoProvider final : public GeoProvider {
 public:
  static FileGeoProvider load(const std::filesystem::path& path);
  static FileGeoProvider parse(std::string_view text);

  GeoInfo lookup(const std::string& address) const override;
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::array<std::uint8_t, 16> prefix{};
    int bits = 0;
    bool v6 = false;
    GeoInfo info;
  };
  std::vector<Entry> entries_;
};

}  // namespace dh::dns
