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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "domainharvester/embedder.hpp"
#include "domainharvester/kernels.hpp"
#include "domainharvester/serialize.hpp"
#include "domainharvester/snapshot_store.hpp"

namespace dh::features {

// The thirteen feature groups, in column order.
enum class Group : std::uint8_t {
  TitleEmb,
  LinkTextEmb,
  Backlinks,
  CertIssuerOrg,
  CertIssuerCountry,
  CertSubjectOrg,
  CertSubjectCountry,
  DnsCounts,
  ACountry,
  AOrg,
  AaaaCountry,
  AaaaOrg,
  SecMechanisms,
};

inline constexpr std::size_t kGroupCount = 13;

std::string_view to_string(Group g);
Group group_from_string(std::string_view s);
bool is_embedding(Group g);
// Groups whose columns come from a vocabulary.
inline constexpr std::array<Group, 9> kCategoricalGroups = {
    Group::Backlinks,   Group::CertIssuerOrg, Group::CertIssuerCountry, Group::CertSubjectOrg, Group::CertSubjectCountry,
    Group::ACountry,    Group::AOrg,          Group::AaaaCountry,       Group::AaaaOrg};

struct CategoricalVocab {
  Group group = Group::Backlinks;
  std::vector<std::string> values;  // sorted, unique
  std::uint64_t built_from = 0;

  friend bool operator==(const CategoricalVocab&, const CategoricalVocab&) = default;
};

// One vocabulary per categorical group, in kCategoricalGroups order.
using Vocabularies = std::vector<CategoricalVocab>;

struct FeatureOptions {
  bool binary_backlinks = false;
  std::uint32_t backlink_cap = 255;
  std::size_t text_limit_bytes = 8192;
  kernels::ExecMode mode = kernels::ExecMode::Parallel;
};

// Dense row-major matrix; rows are PLDs in sorted order.
struct FeatureMatrix {
  std::uint64_t iteration_id = 0;
  std::string embedder_model;
  Vocabularies vocabs;
  std::vector<std::string> columns;
  std::vector<Group> column_groups;
  std::vector<std::string> plds;
  std::vector<double> data;

  std::size_t rows() const { return plds.size(); }
  std::size_t width() const { return columns.size(); }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * width(), width()}; }
  double at(std::size_t r, std::size_t c) const { return data[r * width() + c]; }
  std::optional<std::size_t> row_index(const std::string& pld) const;
  // Column index range [first, last) of a group.
  std::pair<std::size_t, std::size_t> group_range(Group g) const;
  // sha256 over the column names.
  std::string schema_fingerprint() const;
  // Rows restricted to the given PLDs (which must be present), in the given order.
  FeatureMatrix subset(const std::vector<std::string>& keep) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

void to_json(Json& j, const CategoricalVocab& v);
void from_json(const Json& j, CategoricalVocab& v);
void to_json(Json& j, const FeatureMatrix& v);
void from_json(const Json& j, FeatureMatrix& v);

Vocabularies build_vocabs(const store::IterationSnapshot& snapshot);

// Page titles ordered by URL, then space-joined and truncated.
std::string title_text(const web::DomainWebRecord& record, std::size_t limit_bytes = 8192);
std::string link_text(const web::DomainWebRecord& record, std::size_t limit_bytes = 8192);

// Throws EmbedderFailure.
FeatureMatrix extract_features(const store::IterationSnapshot& snapshot, const Vocabularies& vocabs,
                               Embedder& embedder, const FeatureOptions& options = {});

// Column-level importance keyed by column name.
using ColumnImportance = std::map<std::string, double>;

// Keeps every embedding column plus the top_k scalar columns by prior
// importance (ties broken by column order). Identity without a prior.
FeatureMatrix select_features(const FeatureMatrix& matrix, const std::optional<ColumnImportance>& prior,
                              std::size_t top_k = 2000);

// Sums column importance per group; all 13 groups present.
std::map<Group, double> group_importance(const FeatureMatrix& matrix, const std::vector<double>& column_importance);

}  // namespace dh::features
