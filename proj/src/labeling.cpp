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

#include "domainharvester/labeling.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "domainharvester/error.hpp"
#include "domainharvester/io.hpp"

namespace dh::labeling {
namespace {

constexpr std::array<std::string_view, 5> kCategoryNames = {"DnsChange", "CertChange", "AccessChange",
                                                            "BacklinkDrop", "Parking"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::set<std::string> ns_set(const dns::DnsSnapshotEntry& e) {
  std::set<std::string> out;
  for (auto v : e.values(dns::RrType::NS)) {
    v = lower(v);
    while (!v.empty() && v.back() == '.') v.pop_back();
    out.insert(v);
  }
  return out;
}

std::string show(const std::set<std::string>& s) {
  std::string out = "{";
  for (const auto& v : s) {
    if (out.size() > 1) out += ",";
    out += v;
  }
  return out + "}";
}

std::string describe(const web::FetchStatus& s) {
  if (s.error != web::FetchError::None) return std::string(web::to_string(s.error));
  return "HTTP " + std::to_string(s.http_status);
}

bool cert_expired_at_fetch(const web::DomainWebRecord& r) {
  return r.via_https && r.certificate && !r.certificate->valid_at(r.fetched_at);
}

}  // namespace

std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

Category category_from_string(std::string_view s) {
  for (auto c : kCategories) {
    if (to_string(c) == s) return c;
  }
  throw Error(Errc::CorruptArtifact, "unknown label category '" + std::string(s) + "'");
}

std::vector<std::string> LabelReport::labeled() const {
  std::vector<std::string> out;
  for (const auto& [pld, l] : labels) {
    if (l.untrustworthy()) out.push_back(pld);
  }
  return out;
}

std::vector<std::string> LabelReport::unknown() const {
  std::vector<std::string> out;
  for (const auto& [pld, l] : labels) {
    if (!l.untrustworthy()) out.push_back(pld);
  }
  return out;
}

void to_json(Json& j, const TrustLabel& v) {
  j = Json{{"pld", v.pld},
           {"verdict", v.category ? "Untrustworthy" : "Unknown"},
           {"category", v.category ? Json(std::string(to_string(*v.category))) : Json(nullptr)},
           {"evidence", v.evidence}};
}

void from_json(const Json& j, TrustLabel& v) {
  v.pld = get_field<std::string>(j, "pld");
  v.category.reset();
  if (!j.at("category").is_null()) v.category = category_from_string(get_field<std::string>(j, "category"));
  v.evidence = get_field<std::string>(j, "evidence");
}

void to_json(Json& j, const LabelReport& v) {
  Json counts = Json::object();
  for (auto c : kCategories) counts[std::string(to_string(c))] = v.count(c);
  std::vector<TrustLabel> labels;
  for (const auto& [_, l] : v.labels) labels.push_back(l);
  j = Json{{"iteration_id", v.iteration_id},
           {"previous_iteration_id", v.previous_iteration_id},
           {"counts", counts},
           {"subtotal", v.subtotal},
           {"labels", labels},
           {"departed", v.departed}};
}

void from_json(const Json& j, LabelReport& v) {
  v.iteration_id = get_field<std::uint64_t>(j, "iteration_id");
  v.previous_iteration_id = get_field<std::uint64_t>(j, "previous_iteration_id");
  const auto& counts = j.at("counts");
  for (auto c : kCategories) {
    v.counts[static_cast<std::size_t>(c)] = get_field<std::size_t>(counts, std::string(to_string(c)).c_str());
  }
  v.subtotal = get_field<std::size_t>(j, "subtotal");
  v.labels.clear();
  for (auto& l : get_field<std::vector<TrustLabel>>(j, "labels")) v.labels.emplace(l.pld, l);
  v.departed = get_field<std::vector<TrustLabel>>(j, "departed");
}

ParkingConfig ParkingConfig::parse(std::string_view providers_text) {
  ParkingConfig cfg;
  std::istringstream in{std::string(providers_text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    while (!line.empty() && line.back() == '.') line.pop_back();
    if (!line.empty()) cfg.ns_providers.push_back(lower(line));
  }
  if (cfg.ns_providers.empty()) throw Error(Errc::ConfigError, "parking provider list is empty");
  return cfg;
}

ParkingConfig ParkingConfig::load(const std::filesystem::path& providers_file) {
  return parse(read_file(providers_file));
}

bool rule_dns_change(const dns::DnsSnapshotEntry& prev, const dns::DnsSnapshotEntry& curr, std::string* evidence) {
  if (prev.nxdomain() || curr.nxdomain()) {
    if (evidence) *evidence = std::string("NXDOMAIN in ") + (prev.nxdomain() ? "previous" : "current") + " snapshot";
    return true;
  }
  const auto a = ns_set(prev);
  const auto b = ns_set(curr);
  if (a == b) return false;
  if (evidence) *evidence = "NS " + show(a) + " -> " + show(b);
  return true;
}

bool rule_cert_expired(const web::DomainWebRecord& prev, const web::DomainWebRecord& curr, std::string* evidence) {
  for (const auto* r : {&prev, &curr}) {
    if (!cert_expired_at_fetch(*r)) continue;
    if (evidence) {
      *evidence = std::string("certificate outside validity at fetch ") + format_timestamp(r->fetched_at) +
                  " (not_after " + format_timestamp(r->certificate->not_after) + ") in " +
                  (r == &prev ? "previous" : "current") + " snapshot";
    }
    return true;
  }
  return false;
}

bool rule_access_failure(const web::DomainWebRecord& prev, const web::DomainWebRecord& curr, std::string* evidence) {
  for (const auto* r : {&prev, &curr}) {
    if (!r->access.is_access_failure()) continue;
    if (evidence) {
      *evidence = describe(r->access) + " fetching " + r->landing_url + " in " +
                  (r == &prev ? "previous" : "current") + " snapshot";
    }
    return true;
  }
  return false;
}

bool rule_backlink_drop(std::size_t prev_count, std::size_t curr_count, double drop_ratio) {
  if (prev_count == 0 || curr_count >= prev_count) return false;
  const double reduction = static_cast<double>(prev_count - curr_count) / static_cast<double>(prev_count);
  return reduction > drop_ratio;
}

bool is_parked(const dns::DnsSnapshotEntry& dns, const web::DomainWebRecord& web, const ParkingConfig& cfg,
               std::string* evidence) {
  for (const auto& ns : ns_set(dns)) {
    for (const auto& p : cfg.ns_providers) {
      if (ns == p || (ns.size() > p.size() && ns.compare(ns.size() - p.size(), p.size(), p) == 0 &&
                      ns[ns.size() - p.size() - 1] == '.')) {
        if (evidence) *evidence = "NS " + ns + " matches parking provider " + p;
        return true;
      }
    }
  }
  if (web.access.ok()) {
    if (web.landing.ad_frame_count >= cfg.min_ad_frames && web.landing.word_count < cfg.max_words) {
      if (evidence) {
        *evidence = std::to_string(web.landing.ad_frame_count) + " ad frames and " +
                    std::to_string(web.landing.word_count) + " words on landing page";
      }
      return true;
    }
    const auto text = lower(web.landing.text_excerpt);
    for (const auto& phrase : cfg.sale_phrases) {
      if (text.find(lower(phrase)) != std::string::npos) {
        if (evidence) *evidence = "landing page says \"" + phrase + "\"";
        return true;
      }
    }
  }
  return false;
}

bool rule_parking(const dns::DnsSnapshotEntry& prev_dns, const web::DomainWebRecord& prev_web,
                  const dns::DnsSnapshotEntry& curr_dns, const web::DomainWebRecord& curr_web,
                  const ParkingConfig& cfg, std::string* evidence) {
  std::string note;
  if (is_parked(prev_dns, prev_web, cfg, &note)) {
    if (evidence) *evidence = note + " in previous snapshot";
    return true;
  }
  if (is_parked(curr_dns, curr_web, cfg, &note)) {
    if (evidence) *evidence = note + " in current snapshot";
    return true;
  }
  return false;
}

LabelReport label_iteration(const store::IterationSnapshot& prev, const store::IterationSnapshot& curr,
                            const ParkingConfig& cfg, double drop_ratio) {
  if (prev.seed_list != curr.seed_list) {
    throw Error(Errc::SnapshotMismatch, "seed lists differ: " + prev.seed_list + " vs " + curr.seed_list);
  }
  if (prev.iteration_id >= curr.iteration_id) {
    throw Error(Errc::SnapshotMismatch, "previous iteration " + std::to_string(prev.iteration_id) +
                                            " is not older than " + std::to_string(curr.iteration_id));
  }
  LabelReport report;
  report.iteration_id = curr.iteration_id;
  report.previous_iteration_id = prev.iteration_id;
  static const dns::DnsSnapshotEntry kNoDns;

  auto dns_of = [](const store::IterationSnapshot& s, const std::string& pld) -> const dns::DnsSnapshotEntry& {
    auto it = s.dns.find(pld);
    return it == s.dns.end() ? kNoDns : it->second;
  };

  for (const auto& [pld, cw] : curr.web.discovered) {
    TrustLabel label{pld, std::nullopt, ""};
    auto pit = prev.web.discovered.find(pld);
    if (pit == prev.web.discovered.end()) {
      label.evidence = "first seen this iteration";
      report.labels.emplace(pld, std::move(label));
      continue;
    }
    const auto& pw = pit->second;
    const auto& pd = dns_of(prev, pld);
    const auto& cd = dns_of(curr, pld);
    std::string ev;
    if (rule_dns_change(pd, cd, &ev)) {
      label.category = Category::DnsChange;
    } else if (rule_cert_expired(pw, cw, &ev)) {
      label.category = Category::CertChange;
    } else if (rule_access_failure(pw, cw, &ev)) {
      label.category = Category::AccessChange;
    } else if (rule_backlink_drop(pw.backlink_count(), cw.backlink_count(), drop_ratio)) {
      label.category = Category::BacklinkDrop;
      ev = "backlinks " + std::to_string(pw.backlink_count()) + " -> " + std::to_string(cw.backlink_count());
    } else if (rule_parking(pd, pw, cd, cw, cfg, &ev)) {
      label.category = Category::Parking;
    }
    label.evidence = std::move(ev);
    if (label.category) ++report.counts[static_cast<std::size_t>(*label.category)];
    report.labels.emplace(pld, std::move(label));
  }
  for (const auto& [pld, pw] : prev.web.discovered) {
    if (curr.web.discovered.count(pld)) continue;
    report.departed.push_back({pld, Category::BacklinkDrop,
                               "backlinks " + std::to_string(pw.backlink_count()) + " -> 0, not discovered"});
  }
  report.subtotal = aggregate_subtotal(report.counts);
  return report;
}

std::size_t aggregate_subtotal(const std::array<std::size_t, 5>& counts) {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

}  // namespace dh::labeling
