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

#include "domainharvester/listgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "domainharvester/error.hpp"
#include "domainharvester/io.hpp"

namespace dh::listgen {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(b, e - b + 1));
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

Accounting account(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t f) {
  Accounting x{a, b, c, b + c, 0, f, 0};
  x.e = a - x.d;
  x.g = x.e - f;
  if (a < 0 || b < 0 || c < 0 || f < 0 || x.e < 0 || x.g < 0) {
    throw Error(Errc::InvalidArgument, "accounting produced a negative count");
  }
  return x;
}

std::int64_t carry_forward(std::int64_t g_prev, std::int64_t added, std::int64_t removed) {
  return g_prev + added - removed;
}

void to_json(Json& j, const Accounting& v) {
  j = Json{{"A", v.a}, {"B", v.b}, {"C", v.c}, {"D", v.d}, {"E", v.e}, {"F", v.f}, {"G", v.g}};
}

void from_json(const Json& j, Accounting& v) {
  v.a = get_field<std::int64_t>(j, "A");
  v.b = get_field<std::int64_t>(j, "B");
  v.c = get_field<std::int64_t>(j, "C");
  v.d = get_field<std::int64_t>(j, "D");
  v.e = get_field<std::int64_t>(j, "E");
  v.f = get_field<std::int64_t>(j, "F");
  v.g = get_field<std::int64_t>(j, "G");
}

void to_json(Json& j, const DHList& v) {
  Json entries = Json::object();
  for (const auto& [pld, e] : v.entries) {
    entries[pld] = {{"score", e.score}, {"first_seen", e.first_seen}, {"backlinks", e.backlinks}};
  }
  j = Json{{"seed_list", v.seed_list},
           {"iteration_id", v.iteration_id},
           {"date", v.date},
           {"threshold", v.threshold},
           {"model_applied", v.model_applied},
           {"note", v.note},
           {"accounting", v.accounting},
           {"added", v.added},
           {"removed", v.removed},
           {"post_filtered", v.post_filtered},
           {"entries", entries}};
}

void from_json(const Json& j, DHList& v) {
  v.seed_list = get_field<std::string>(j, "seed_list");
  v.iteration_id = get_field<std::uint64_t>(j, "iteration_id");
  v.date = get_field<std::string>(j, "date");
  v.threshold = get_field<double>(j, "threshold");
  v.model_applied = get_field<bool>(j, "model_applied");
  v.note = get_field<std::string>(j, "note");
  v.accounting = get_field<Accounting>(j, "accounting");
  v.added = get_field<std::vector<std::string>>(j, "added");
  v.removed = get_field<std::vector<std::string>>(j, "removed");
  v.post_filtered = get_field<std::size_t>(j, "post_filtered");
  v.entries.clear();
  for (const auto& [pld, e] : j.at("entries").items()) {
    v.entries[pld] = {get_field<double>(e, "score"), get_field<std::uint64_t>(e, "first_seen"),
                      get_field<std::uint32_t>(e, "backlinks")};
  }
}

std::string render_plain(const DHList& list) {
  std::string out;
  for (const auto& [pld, _] : list.entries) out += pld + "\n";
  return out;
}

void validate_threshold(double threshold) {
  if (!(threshold > 0 && threshold <= 1)) {
    throw Error(Errc::ConfigError, "threshold must be in (0, 1], got " + std::to_string(threshold));
  }
}

std::set<std::string> apply_threshold(const std::map<std::string, double>& scores, double threshold) {
  std::set<std::string> out;
  for (const auto& [pld, s] : scores) {
    if (s < threshold) out.insert(pld);
  }
  return out;
}

DHList generate_dhlist(const pu::PuModel* model, const features::FeatureMatrix& matrix,
                       const labeling::LabelReport& report, const pu::TrainingSet& ts, const ListOptions& options,
                       const DHList* prev, const std::map<std::string, std::uint32_t>& backlinks) {
  validate_threshold(options.threshold);
  std::set<std::string> excluded(ts.positives.begin(), ts.positives.end());
  excluded.insert(ts.unlabeled.begin(), ts.unlabeled.end());
  for (const auto& p : report.labeled()) excluded.insert(p);

  std::vector<std::string> input;
  for (const auto& p : matrix.plds) {
    if (!excluded.count(p)) input.push_back(p);
  }
  std::sort(input.begin(), input.end());

  std::map<std::string, double> scores;
  if (model) {
    scores = pu::score(*model, matrix.subset(input));
  } else {
    for (const auto& p : input) scores[p] = 0.0;
  }

  DHList list;
  list.iteration_id = matrix.iteration_id;
  list.threshold = options.threshold;
  list.model_applied = model != nullptr;
  for (const auto& p : apply_threshold(scores, options.threshold)) {
    if (options.drop.count(p)) {
      ++list.post_filtered;
      continue;
    }
    DhEntry e;
    e.score = scores.at(p);
    e.first_seen = list.iteration_id;
    if (prev) {
      if (auto it = prev->entries.find(p); it != prev->entries.end()) e.first_seen = it->second.first_seen;
    }
    if (auto it = backlinks.find(p); it != backlinks.end()) e.backlinks = it->second;
    list.entries.emplace(p, e);
  }

  const auto a = static_cast<std::int64_t>(matrix.rows());
  const auto e = static_cast<std::int64_t>(input.size());
  const auto g = static_cast<std::int64_t>(list.entries.size());
  list.accounting = account(a, static_cast<std::int64_t>(ts.b()), static_cast<std::int64_t>(ts.c()), e - g);
  if (list.accounting.e != e) {
    throw Error(Errc::InvalidArgument, "training set contains PLDs outside the feature matrix");
  }

  for (const auto& [p, _] : list.entries) {
    if (!prev || !prev->entries.count(p)) list.added.push_back(p);
  }
  if (prev) {
    for (const auto& [p, _] : prev->entries) {
      if (!list.entries.count(p)) list.removed.push_back(p);
    }
  }
  return list;
}

std::set<std::string> load_verdicts(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto t = trim(line);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (!t.empty()) out.insert(t);
  }
  return out;
}

TopListFormat toplist_format_from_string(std::string_view s) {
  if (s == "auto") return TopListFormat::Auto;
  if (s == "plain") return TopListFormat::Plain;
  if (s == "rank-csv") return TopListFormat::RankCsv;
  throw Error(Errc::ConfigError, "unknown top-list format '" + std::string(s) + "' (auto | plain | rank-csv)");
}

TopList parse_toplist(std::string_view text, TopListFormat format, const pld::SuffixRuleSet& rules,
                      std::string name) {
  struct Row {
    std::size_t rank;
    std::string entry;
  };
  std::vector<Row> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::size_t position = 0;
  TopList out;
  out.name = std::move(name);
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto comma = t.find(',');
    auto fmt = format;
    if (fmt == TopListFormat::Auto) fmt = comma == std::string::npos ? TopListFormat::Plain : TopListFormat::RankCsv;
    if (fmt == TopListFormat::Plain) {
      rows.push_back({++position, t});
      continue;
    }
    if (comma == std::string::npos) {
      throw Error(Errc::UnparseableFile, "line " + std::to_string(lineno) + ": expected rank,domain");
    }
    const auto rank_text = trim(t.substr(0, comma));
    const auto entry = trim(t.substr(comma + 1));
    if (!all_digits(rank_text)) {
      if (rows.empty() && position == 0) {  // header row
        ++position;
        continue;
      }
      throw Error(Errc::UnparseableFile, "line " + std::to_string(lineno) + ": rank is not a number");
    }
    rows.push_back({static_cast<std::size_t>(std::stoull(rank_text)), entry});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.rank < b.rank; });
  out.raw_entries = rows.size();
  for (const auto& r : rows) {
    try {
      const auto p = pld::normalize_entry(r.entry, rules);
      if (out.best_rank.emplace(p.name, r.rank).second) out.normalized.push_back(p.name);
    } catch (const Error& e) {
      switch (e.code()) {
        case Errc::IPAddressEntry: ++out.skipped["ip_address"]; break;
        case Errc::NoRegistrableDomain: ++out.skipped["no_registrable_domain"]; break;
        default: ++out.skipped["invalid_entry"]; break;
      }
    }
  }
  return out;
}

TopList load_toplist(const std::filesystem::path& path, TopListFormat format, const pld::SuffixRuleSet& rules) {
  return parse_toplist(read_file(path), format, rules, path.stem().string());
}

TopList top_k(const TopList& list, std::size_t k) {
  if (k == 0) throw Error(Errc::InvalidArgument, "top_k needs k >= 1");
  TopList out;
  out.name = list.name;
  out.raw_entries = list.raw_entries;
  out.skipped = list.skipped;
  const auto n = std::min(k, list.normalized.size());
  out.normalized.assign(list.normalized.begin(), list.normalized.begin() + static_cast<std::ptrdiff_t>(n));
  for (const auto& p : out.normalized) out.best_rank[p] = list.best_rank.at(p);
  return out;
}

double overlap_percentage(std::size_t count, std::size_t denominator, int decimals) {
  if (denominator == 0) return 0;
  const double scale = std::pow(10.0, decimals);
  return std::round(100.0 * static_cast<double>(count) / static_cast<double>(denominator) * scale) / scale;
}

OverlapReport overlap(const std::set<std::string>& dh, const TopList& top, std::string dh_name) {
  OverlapReport r;
  r.dh_name = std::move(dh_name);
  r.top_name = top.name;
  r.denominator = dh.size();
  for (const auto& p : top.normalized) r.count += dh.count(p);
  r.percentage = overlap_percentage(r.count, r.denominator);
  return r;
}

OverlapReport overlap(const DHList& dh, const TopList& top) {
  std::set<std::string> plds;
  for (const auto& [p, _] : dh.entries) plds.insert(p);
  return overlap(plds, top, dh.seed_list);
}

std::string format_overlap(const OverlapReport& r, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision,
                overlap_percentage(r.count, r.denominator, std::max(precision, 0)));
  return group_thousands(static_cast<std::int64_t>(r.count)) + " (" + buf + "%)";
}

std::string group_thousands(std::int64_t n) {
  std::string digits = std::to_string(n < 0 ? -n : n);
  for (int i = static_cast<int>(digits.size()) - 3; i > 0; i -= 3) digits.insert(static_cast<std::size_t>(i), ",");
  return n < 0 ? "-" + digits : digits;
}

}  // namespace dh::listgen
