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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "domainharvester/serialize.hpp"
#include "domainharvester/snapshot_store.hpp"

namespace dh::labeling {

// Rule order is evaluation order.
enum class Category : std::uint8_t { DnsChange, CertChange, AccessChange, BacklinkDrop, Parking };

inline constexpr std::array<Category, 5> kCategories = {Category::DnsChange, Category::CertChange,
                                                        Category::AccessChange, Category::BacklinkDrop,
                                                        Category::Parking};

std::string_view to_string(Category c);
Category category_from_string(std::string_view s);

struct TrustLabel {
  std::string pld;
  std::optional<Category> category;  // nullopt = Unknown
  std::string evidence;

  bool untrustworthy() const { return category.has_value(); }
  friend bool operator==(const TrustLabel&, const TrustLabel&) = default;
};

struct LabelReport {
  std::uint64_t iteration_id = 0;
  std::uint64_t previous_iteration_id = 0;
  std::array<std::size_t, 5> counts{};
  std::size_t subtotal = 0;  // B
  std::map<std::string, TrustLabel> labels;  // every PLD discovered in the current snapshot
  // Discovered last time but not this time; they have no current features,
  // so they are reported here and kept out of B.
  std::vector<TrustLabel> departed;

  std::vector<std::string> labeled() const;
  std::vector<std::string> unknown() const;
  std::size_t count(Category c) const { return counts[static_cast<std::size_t>(c)]; }

  friend bool operator==(const LabelReport&, const LabelReport&) = default;
};

void to_json(Json& j, const TrustLabel& v);
void from_json(const Json& j, TrustLabel& v);
void to_json(Json& j, const LabelReport& v);
void from_json(const Json& j, LabelReport& v);

struct ParkingConfig {
  std::vector<std::string> ns_providers;  // NS suffixes, e.g. "parking-example.net"
  std::size_t min_ad_frames = 3;
  std::size_t max_words = 50;
  std::vector<std::string> sale_phrases = {"domain is for sale", "domain may be for sale", "buy this domain",
                                           "domain for sale",    "make an offer on this domain",
                                           "this domain is parked"};

  // One suffix per line, '#' comments. Throws ConfigError when empty.
  static ParkingConfig load(const std::filesystem::path& providers_file);
  static ParkingConfig parse(std::string_view providers_text);
};

bool rule_dns_change(const dns::DnsSnapshotEntry& prev, const dns::DnsSnapshotEntry& curr,
                     std::string* evidence = nullptr);
bool rule_cert_expired(const web::DomainWebRecord& prev, const web::DomainWebRecord& curr,
                       std::string* evidence = nullptr);
bool rule_access_failure(const web::DomainWebRecord& prev, const web::DomainWebRecord& curr,
                         std::string* evidence = nullptr);
bool rule_backlink_drop(std::size_t prev_count, std::size_t curr_count, double drop_ratio = 0.5);
bool is_parked(const dns::DnsSnapshotEntry& dns, const web::DomainWebRecord& web, const ParkingConfig& cfg,
               std::string* evidence = nullptr);
bool rule_parking(const dns::DnsSnapshotEntry& prev_dns, const web::DomainWebRecord& prev_web,
                  const dns::DnsSnapshotEntry& curr_dns, const web::DomainWebRecord& curr_web,
                  const ParkingConfig& cfg, std::string* evidence = nullptr);

// Throws SnapshotMismatch when the snapshots belong to different seed lists
// or are out of order.
LabelReport label_iteration(const store::IterationSnapshot& prev, const store::IterationSnapshot& curr,
                            const ParkingConfig& cfg, double drop_ratio = 0.5);

// Subtotal B of per-category counts.
std::size_t aggregate_subtotal(const std::array<std::size_t, 5>& counts);

}  // namespace dh::labeling
