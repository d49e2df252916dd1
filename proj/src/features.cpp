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

#include "domainharvester/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "domainharvester/digest.hpp"
#include "domainharvester/error.hpp"
#include "domainharvester/html.hpp"

namespace dh::features {
namespace {

constexpr std::array<std::string_view, kGroupCount> kGroupNames = {
    "title_emb",    "linktext_emb", "backlinks",   "cert_issuer_org", "cert_issuer_country",
    "cert_subject_org", "cert_subject_country", "dns_counts", "a_country", "a_org",
    "aaaa_country", "aaaa_org",     "sec_mechanisms"};

std::size_t vocab_slot(Group g) {
  for (std::size_t i = 0; i < kCategoricalGroups.size(); ++i) {
    if (kCategoricalGroups[i] == g) return i;
  }
  throw Error(Errc::InvalidArgument, "group " + std::string(to_string(g)) + " has no vocabulary");
}

template <typename Fn>
void for_each_value(const store::IterationSnapshot& s, const std::string& pld, Group g, Fn&& fn) {
  const auto& rec = s.web.discovered.at(pld);
  auto geo = [&](bool v6, bool org) {
    auto it = s.dns.find(pld);
    if (it == s.dns.end()) return;
    for (const auto& gi : v6 ? it->second.aaaa_geo : it->second.a_geo) {
      const auto& v = org ? gi.organization : gi.country;
      if (v != dns::kUnknownGeo && !v.empty()) fn(v);
    }
  };
  auto cert = [&](auto member) {
    if (rec.via_https && rec.certificate) {
      const std::string& v = (*rec.certificate).*member;
      if (!v.empty()) fn(v);
    }
  };
  switch (g) {
    case Group::Backlinks:
      for (const auto& [src, _] : rec.backlinks) fn(src);
      break;
    case Group::CertIssuerOrg: cert(&web::CertificateInfo::issuer_organization); break;
    case Group::CertIssuerCountry: cert(&web::CertificateInfo::issuer_country); break;
    case Group::CertSubjectOrg: cert(&web::CertificateInfo::subject_organization); break;
    case Group::CertSubjectCountry: cert(&web::CertificateInfo::subject_country); break;
    case Group::ACountry: geo(false, false); break;
    case Group::AOrg: geo(false, true); break;
    case Group::AaaaCountry: geo(true, false); break;
    case Group::AaaaOrg: geo(true, true); break;
    default: break;
  }
}

std::string join_sorted(std::vector<std::pair<std::string, std::string>> items, std::size_t limit) {
  std::sort(items.begin(), items.end());
  std::string out;
  for (const auto& [_, text] : items) {
    if (text.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += text;
    if (out.size() >= limit) break;
  }
  return web::truncate_utf8(out, limit);
}

}  // namespace

std::string_view to_string(Group g) { return kGroupNames[static_cast<std::size_t>(g)]; }

Group group_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kGroupNames.size(); ++i) {
    if (kGroupNames[i] == s) return static_cast<Group>(i);
  }
  throw Error(Errc::CorruptArtifact, "unknown feature group '" + std::string(s) + "'");
}

bool is_embedding(Group g) { return g == Group::TitleEmb || g == Group::LinkTextEmb; }

std::optional<std::size_t> FeatureMatrix::row_index(const std::string& pld) const {
  auto it = std::lower_bound(plds.begin(), plds.end(), pld);
  if (it != plds.end() && *it == pld) return static_cast<std::size_t>(it - plds.begin());
  // Subsets keep caller order, so fall back to a scan.
  for (std::size_t i = 0; i < plds.size(); ++i) {
    if (plds[i] == pld) return i;
  }
  return std::nullopt;
}

std::pair<std::size_t, std::size_t> FeatureMatrix::group_range(Group g) const {
  auto first = std::find(column_groups.begin(), column_groups.end(), g);
  auto last = std::find_if(first, column_groups.end(), [&](Group x) { return x != g; });
  return {static_cast<std::size_t>(first - column_groups.begin()), static_cast<std::size_t>(last - column_groups.begin())};
}

std::string FeatureMatrix::schema_fingerprint() const {
  std::string joined;
  for (const auto& c : columns) {
    joined += c;
    joined.push_back('\n');
  }
  return sha256_hex(joined);
}

FeatureMatrix FeatureMatrix::subset(const std::vector<std::string>& keep) const {
  FeatureMatrix out;
  out.iteration_id = iteration_id;
  out.embedder_model = embedder_model;
  out.vocabs = vocabs;
  out.columns = columns;
  out.column_groups = column_groups;
  out.plds = keep;
  out.data.reserve(keep.size() * width());
  for (const auto& p : keep) {
    const auto r = row_index(p);
    if (!r) throw Error(Errc::InvalidArgument, "subset: unknown PLD " + p);
    const auto row_span = row(*r);
    out.data.insert(out.data.end(), row_span.begin(), row_span.end());
  }
  return out;
}

void to_json(Json& j, const CategoricalVocab& v) {
  j = Json{{"group", std::string(to_string(v.group))}, {"values", v.values}, {"built_from", v.built_from}};
}

void from_json(const Json& j, CategoricalVocab& v) {
  v.group = group_from_string(get_field<std::string>(j, "group"));
  v.values = get_field<std::vector<std::string>>(j, "values");
  v.built_from = get_field<std::uint64_t>(j, "built_from");
}

void to_json(Json& j, const FeatureMatrix& v) {
  std::vector<std::string> groups;
  for (auto g : v.column_groups) groups.emplace_back(to_string(g));
  j = Json{{"iteration_id", v.iteration_id}, {"embedder_model", v.embedder_model},
           {"vocabs", v.vocabs},             {"columns", v.columns},
           {"column_groups", groups},        {"plds", v.plds},
           {"data", v.data}};
}

void from_json(const Json& j, FeatureMatrix& v) {
  v.iteration_id = get_field<std::uint64_t>(j, "iteration_id");
  v.embedder_model = get_field<std::string>(j, "embedder_model");
  v.vocabs = get_field<Vocabularies>(j, "vocabs");
  v.columns = get_field<std::vector<std::string>>(j, "columns");
  v.column_groups.clear();
  for (const auto& g : get_field<std::vector<std::string>>(j, "column_groups")) v.column_groups.push_back(group_from_string(g));
  v.plds = get_field<std::vector<std::string>>(j, "plds");
  v.data = get_field<std::vector<double>>(j, "data");
  if (v.column_groups.size() != v.columns.size() || v.data.size() != v.plds.size() * v.columns.size()) {
    throw Error(Errc::CorruptArtifact, "feature matrix shape mismatch");
  }
}

Vocabularies build_vocabs(const store::IterationSnapshot& snapshot) {
  Vocabularies out;
  for (auto g : kCategoricalGroups) {
    std::set<std::string> values;
    for (const auto& [pld, _] : snapshot.web.discovered) {
      for_each_value(snapshot, pld, g, [&](const std::string& v) { values.insert(v); });
    }
    out.push_back({g, {values.begin(), values.end()}, snapshot.iteration_id});
  }
  return out;
}

std::string title_text(const web::DomainWebRecord& record, std::size_t limit_bytes) {
  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& t : record.titles) items.emplace_back(t.url, t.title);
  return join_sorted(std::move(items), limit_bytes);
}

std::string link_text(const web::DomainWebRecord& record, std::size_t limit_bytes) {
  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& l : record.link_texts) items.emplace_back(l.source_url, l.text);
  return join_sorted(std::move(items), limit_bytes);
}

FeatureMatrix extract_features(const store::IterationSnapshot& snapshot, const Vocabularies& vocabs,
                               Embedder& embedder, const FeatureOptions& options) {
  if (vocabs.size() != kCategoricalGroups.size()) throw Error(Errc::InvalidArgument, "vocabulary count mismatch");
  FeatureMatrix m;
  m.iteration_id = snapshot.iteration_id;
  m.embedder_model = embedder.model_id();
  m.vocabs = vocabs;

  auto add_column = [&](Group g, std::string name) {
    m.columns.push_back(std::string(to_string(g)) + ":" + name);
    m.column_groups.push_back(g);
  };
  for (auto g : {Group::TitleEmb, Group::LinkTextEmb}) {
    for (std::size_t i = 0; i < kEmbeddingDim; ++i) add_column(g, std::to_string(i));
  }
  std::array<std::size_t, kGroupCount> group_start{};
  for (std::size_t gi = static_cast<std::size_t>(Group::Backlinks); gi < kGroupCount; ++gi) {
    const auto g = static_cast<Group>(gi);
    group_start[gi] = m.columns.size();
    if (g == Group::DnsCounts) {
      for (auto t : dns::kCollectedTypes) add_column(g, std::string(dns::to_string(t)));
    } else if (g == Group::SecMechanisms) {
      for (const char* n : dns::SecurityMechanisms::kNames) add_column(g, n);
    } else {
      const auto& vocab = vocabs[vocab_slot(g)];
      if (vocab.group != g) throw Error(Errc::InvalidArgument, "vocabularies out of order");
      for (const auto& v : vocab.values) add_column(g, v);
    }
  }

  for (const auto& [pld, _] : snapshot.web.discovered) m.plds.push_back(pld);

  std::vector<std::string> texts;
  texts.reserve(2 * m.plds.size());
  for (const auto& pld : m.plds) {
    const auto& rec = snapshot.web.discovered.at(pld);
    texts.push_back(title_text(rec, options.text_limit_bytes));
    texts.push_back(link_text(rec, options.text_limit_bytes));
  }
  const auto embeddings = embedder.embed_batch(texts);
  if (embeddings.size() != texts.size()) throw Error(Errc::EmbedderFailure, "embedder returned wrong batch size");
  for (const auto& e : embeddings) {
    if (e.size() != kEmbeddingDim) throw Error(Errc::EmbedderFailure, "embedder returned wrong dimension");
  }

  std::vector<kernels::RowSpec> specs(m.plds.size());
  for (std::size_t r = 0; r < m.plds.size(); ++r) {
    const auto& pld = m.plds[r];
    auto& spec = specs[r];
    spec.embedding_dim = kEmbeddingDim;
    spec.title = embeddings[2 * r].data();
    spec.link = embeddings[2 * r + 1].data();
    for (auto g : kCategoricalGroups) {
      const auto& values = vocabs[vocab_slot(g)].values;
      const auto base = group_start[static_cast<std::size_t>(g)];
      if (g == Group::Backlinks) {
        for (const auto& [src, count] : snapshot.web.discovered.at(pld).backlinks) {
          auto it = std::lower_bound(values.begin(), values.end(), src);
          if (it == values.end() || *it != src) continue;
          const double v = options.binary_backlinks ? 1.0 : std::min<double>(count, options.backlink_cap);
          spec.sparse.emplace_back(static_cast<std::uint32_t>(base + (it - values.begin())), v);
        }
        continue;
      }
      for_each_value(snapshot, pld, g, [&](const std::string& v) {
        auto it = std::lower_bound(values.begin(), values.end(), v);
        if (it != values.end() && *it == v) {
          spec.sparse.emplace_back(static_cast<std::uint32_t>(base + (it - values.begin())), 1.0);
        }
      });
    }
    auto dns_it = snapshot.dns.find(pld);
    if (dns_it != snapshot.dns.end()) {
      const auto& entry = dns_it->second;
      const auto base = group_start[static_cast<std::size_t>(Group::DnsCounts)];
      for (std::size_t i = 0; i < dns::kCollectedTypes.size(); ++i) {
        const auto c = entry.count(dns::kCollectedTypes[i]);
        if (c) spec.sparse.emplace_back(static_cast<std::uint32_t>(base + i), static_cast<double>(c));
      }
      const auto sec_base = group_start[static_cast<std::size_t>(Group::SecMechanisms)];
      const auto flags = entry.security.flags();
      for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i]) spec.sparse.emplace_back(static_cast<std::uint32_t>(sec_base + i), 1.0);
      }
    }
  }
  m.data.assign(m.plds.size() * m.width(), 0.0);
  kernels::fill_rows(specs, m.width(), m.data.data(), options.mode);
  return m;
}

FeatureMatrix select_features(const FeatureMatrix& matrix, const std::optional<ColumnImportance>& prior,
                              std::size_t top_k) {
  if (!prior) return matrix;
  std::vector<std::size_t> scalar;
  for (std::size_t c = 0; c < matrix.width(); ++c) {
    if (!is_embedding(matrix.column_groups[c])) scalar.push_back(c);
  }
  if (top_k >= scalar.size()) return matrix;
  auto importance = [&](std::size_t c) {
    auto it = prior->find(matrix.columns[c]);
    return it == prior->end() ? 0.0 : it->second;
  };
  std::stable_sort(scalar.begin(), scalar.end(),
                   [&](std::size_t a, std::size_t b) { return importance(a) > importance(b); });
  std::vector<bool> keep(matrix.width(), false);
  for (std::size_t c = 0; c < matrix.width(); ++c) keep[c] = is_embedding(matrix.column_groups[c]);
  for (std::size_t i = 0; i < top_k; ++i) keep[scalar[i]] = true;

  FeatureMatrix out;
  out.iteration_id = matrix.iteration_id;
  out.embedder_model = matrix.embedder_model;
  out.vocabs = matrix.vocabs;
  out.plds = matrix.plds;
  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < matrix.width(); ++c) {
    if (!keep[c]) continue;
    kept.push_back(c);
    out.columns.push_back(matrix.columns[c]);
    out.column_groups.push_back(matrix.column_groups[c]);
  }
  out.data.reserve(matrix.rows() * kept.size());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (auto c : kept) out.data.push_back(matrix.at(r, c));
  }
  return out;
}

std::map<Group, double> group_importance(const FeatureMatrix& matrix, const std::vector<double>& column_importance) {
  if (column_importance.size() != matrix.width()) {
    throw Error(Errc::SchemaMismatch, "importance vector does not match matrix width");
  }
  std::map<Group, double> out;
  for (std::size_t g = 0; g < kGroupCount; ++g) out[static_cast<Group>(g)] = 0.0;
  for (std::size_t c = 0; c < matrix.width(); ++c) out[matrix.column_groups[c]] += column_importance[c];
  return out;
}

}  // namespace dh::features
