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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "domainharvester/pld.hpp"
#include "domainharvester/pulearn.hpp"
#include "domainharvester/serialize.hpp"

namespace dh::listgen {

struct Accounting {
  std::int64_t a = 0;  // discovered
  std::int64_t b = 0;  // labeled
  std::int64_t c = 0;  // unlabeled sample
  std::int64_t d = 0;  // training = B + C
  std::int64_t e = 0;  // scoring input = A - D
  std::int64_t f = 0;  // detected (excluded)
  std::int64_t g = 0;  // emitted = E - F

  friend bool operator==(const Accounting&, const Accounting&) = default;
};

// Derives D, E and G. Throws InvalidArgument on negative results.
Accounting account(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t f);

// G_t = G_{t-1} + added - removed
std::int64_t carry_forward(std::int64_t g_prev, std::int64_t added, std::int64_t removed);

struct DhEntry {
  double score = 0;
  std::uint64_t first_seen = 0;
  std::uint32_t backlinks = 0;

  friend bool operator==(const DhEntry&, const DhEntry&) = default;
};

struct DHList {
  std::string seed_list;
  std::uint64_t iteration_id = 0;
  std::string date;
  double threshold = 0.1;
  bool model_applied = false;
  std::string note;
  std::map<std::string, DhEntry> entries;
  Accounting accounting;
  std::vector<std::string> added;
  std::vector<std::string> removed;
  std::size_t post_filtered = 0;

  std::size_t size() const { return entries.size(); }
  friend bool operator==(const DHList&, const DHList&) = default;
};

void to_json(Json& j, const Accounting& v);
void from_json(const Json& j, Accounting& v);
void to_json(Json& j, const DHList& v);
void from_json(const Json& j, DHList& v);

// One PLD per line, sorted.
std::string render_plain(const DHList& list);

struct ListOptions {
  double threshold = 0.1;
  // PLDs an external verdict file asks to drop; counted in F.
  std::set<std::string> drop;
};

// Throws ConfigError unless 0 < threshold <= 1.
void validate_threshold(double threshold);

// PLDs with score < threshold.
std::set<std::string> apply_threshold(const std::map<std::string, double>& scores, double threshold);

// E = discovered minus the training set minus labeled PLDs. Without a model
// nothing is scored and every E member is emitted. Throws SchemaMismatch.
DHList generate_dhlist(const pu::PuModel* model, const features::FeatureMatrix& matrix,
                       const labeling::LabelReport& report, const pu::TrainingSet& ts, const ListOptions& options,
                       const DHList* prev, const std::map<std::string, std::uint32_t>& backlinks = {});

// One PLD per line, '#' comments.
std::set<std::string> load_verdicts(const std::filesystem::path& path);

enum class TopListFormat { Auto, Plain, RankCsv };

TopListFormat toplist_format_from_string(std::string_view s);

struct TopList {
  std::string name;
  std::vector<std::string> normalized;  // unique PLDs, best rank first
  std::map<std::string, std::size_t> best_rank;
  std::size_t raw_entries = 0;
  std::map<std::string, std::size_t> skipped;  // reason -> count
};

// Throws UnparseableFile.
TopList parse_toplist(std::string_view text, TopListFormat format, const pld::SuffixRuleSet& rules,
                      std::string name = {});
TopList load_toplist(const std::filesystem::path& path, TopListFormat format, const pld::SuffixRuleSet& rules);

TopList top_k(const TopList& list, std::size_t k);

struct OverlapReport {
  std::string dh_name;
  std::string top_name;
  std::size_t count = 0;
  std::size_t denominator = 0;
  double percentage = 0;  // rounded to 2 decimals
};

double overlap_percentage(std::size_t count, std::size_t denominator, int decimals = 2);
OverlapReport overlap(const std::set<std::string>& dh, const TopList& top, std::string dh_name = {});
OverlapReport overlap(const DHList& dh, const TopList& top);
// 13640 -> "13,640"
std::string group_thousands(std::int64_t n);

// "572 (4.19%)"
std::string format_overlap(const OverlapReport& r, int precision = 2);

}  // namespace dh::listgen
