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

#include "domainharvester/serialize.hpp"

NLOHMANN_JSON_NAMESPACE_BEGIN
void adl_serializer<dh::TimePoint>::to_json(json& j, const dh::TimePoint& t) { j = dh::format_timestamp(t); }
void adl_serializer<dh::TimePoint>::from_json(const json& j, dh::TimePoint& t) {
  t = dh::parse_timestamp(j.get<std::string>());
}
NLOHMANN_JSON_NAMESPACE_END

namespace dh {

std::string dump_canonical(const Json& j) { return j.dump(1, ' ', false, Json::error_handler_t::replace); }

Json parse_json(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(Errc::CorruptArtifact, what + ": " + e.what());
  }
}

namespace web {

void to_json(Json& j, const FetchStatus& v) {
  j = Json{{"http_status", v.http_status}, {"error", std::string(to_string(v.error))}};
}
void from_json(const Json& j, FetchStatus& v) {
  v.http_status = get_field<int>(j, "http_status");
  v.error = fetch_error_from_string(get_field<std::string>(j, "error"));
}

void to_json(Json& j, const CertificateInfo& v) {
  j = Json{{"issuer_organization", v.issuer_organization},
           {"issuer_country", v.issuer_country},
           {"subject_organization", v.subject_organization},
           {"subject_country", v.subject_country},
           {"not_before", v.not_before},
           {"not_after", v.not_after},
           {"chain_valid_at_fetch", v.chain_valid_at_fetch}};
}
void from_json(const Json& j, CertificateInfo& v) {
  v.issuer_organization = get_field<std::string>(j, "issuer_organization");
  v.issuer_country = get_field<std::string>(j, "issuer_country");
  v.subject_organization = get_field<std::string>(j, "subject_organization");
  v.subject_country = get_field<std::string>(j, "subject_country");
  v.not_before = get_field<TimePoint>(j, "not_before");
  v.not_after = get_field<TimePoint>(j, "not_after");
  v.chain_valid_at_fetch = get_field<bool>(j, "chain_valid_at_fetch");
}

void to_json(Json& j, const PageContent& v) {
  j = Json{{"word_count", v.word_count}, {"ad_frame_count", v.ad_frame_count}, {"text_excerpt", v.text_excerpt}};
}
void from_json(const Json& j, PageContent& v) {
  v.word_count = get_field<std::size_t>(j, "word_count");
  v.ad_frame_count = get_field<std::size_t>(j, "ad_frame_count");
  v.text_excerpt = get_field<std::string>(j, "text_excerpt");
}

void to_json(Json& j, const Outlink& v) { j = Json{{"url", v.url}, {"text", v.text}}; }
void from_json(const Json& j, Outlink& v) {
  v.url = get_field<std::string>(j, "url");
  v.text = get_field<std::string>(j, "text");
}

void to_json(Json& j, const PageObservation& v) {
  j = Json{{"url", v.url},
           {"final_url", v.final_url},
           {"depth", v.depth},
           {"external", v.external},
           {"status", v.status},
           {"title", v.title},
           {"outlinks", v.outlinks},
           {"certificate", v.certificate ? Json(*v.certificate) : Json(nullptr)},
           {"fetched_at", v.fetched_at},
           {"content", v.content}};
}
void from_json(const Json& j, PageObservation& v) {
  v.url = get_field<std::string>(j, "url");
  v.final_url = get_field<std::string>(j, "final_url");
  v.depth = get_field<int>(j, "depth");
  v.external = get_field<bool>(j, "external");
  v.status = get_field<FetchStatus>(j, "status");
  v.title = get_field<std::string>(j, "title");
  v.outlinks = get_field<std::vector<Outlink>>(j, "outlinks");
  v.certificate.reset();
  if (!j.at("certificate").is_null()) v.certificate = get_field<CertificateInfo>(j, "certificate");
  v.fetched_at = get_field<TimePoint>(j, "fetched_at");
  v.content = get_field<PageContent>(j, "content");
}

void to_json(Json& j, const TitledPage& v) { j = Json{{"url", v.url}, {"title", v.title}}; }
void from_json(const Json& j, TitledPage& v) {
  v.url = get_field<std::string>(j, "url");
  v.title = get_field<std::string>(j, "title");
}

void to_json(Json& j, const LinkReference& v) { j = Json{{"source_url", v.source_url}, {"text", v.text}}; }
void from_json(const Json& j, LinkReference& v) {
  v.source_url = get_field<std::string>(j, "source_url");
  v.text = get_field<std::string>(j, "text");
}

void to_json(Json& j, const DomainWebRecord& v) {
  j = Json{{"pld", v.pld},
           {"is_seed", v.is_seed},
           {"titles", v.titles},
           {"link_texts", v.link_texts},
           {"backlinks", v.backlinks},
           {"landing_url", v.landing_url},
           {"access", v.access},
           {"via_https", v.via_https},
           {"certificate", v.certificate ? Json(*v.certificate) : Json(nullptr)},
           {"fetched_at", v.fetched_at},
           {"landing", v.landing},
           {"aliases", v.aliases}};
}
void from_json(const Json& j, DomainWebRecord& v) {
  v.pld = get_field<std::string>(j, "pld");
  v.is_seed = get_field<bool>(j, "is_seed");
  v.titles = get_field<std::vector<TitledPage>>(j, "titles");
  v.link_texts = get_field<std::vector<LinkReference>>(j, "link_texts");
  v.backlinks = get_field<std::map<std::string, std::uint32_t>>(j, "backlinks");
  v.landing_url = get_field<std::string>(j, "landing_url");
  v.access = get_field<FetchStatus>(j, "access");
  v.via_https = get_field<bool>(j, "via_https");
  v.certificate.reset();
  if (!j.at("certificate").is_null()) v.certificate = get_field<CertificateInfo>(j, "certificate");
  v.fetched_at = get_field<TimePoint>(j, "fetched_at");
  v.landing = get_field<PageContent>(j, "landing");
  v.aliases = get_field<std::vector<std::string>>(j, "aliases");
}

void to_json(Json& j, const WebCrawlResult& v) {
  j = Json{{"seed_list", v.seed_list},
           {"iteration_id", v.iteration_id},
           {"per_seed", v.per_seed},
           {"discovered", v.discovered},
           {"unreachable_seeds", v.unreachable_seeds}};
}
void from_json(const Json& j, WebCrawlResult& v) {
  v.seed_list = get_field<std::string>(j, "seed_list");
  v.iteration_id = get_field<std::uint64_t>(j, "iteration_id");
  v.per_seed = get_field<std::map<std::string, std::vector<PageObservation>>>(j, "per_seed");
  v.discovered = get_field<std::map<std::string, DomainWebRecord>>(j, "discovered");
  v.unreachable_seeds = get_field<std::vector<std::string>>(j, "unreachable_seeds");
}

}  // namespace web

namespace dns {

void to_json(Json& j, const GeoInfo& v) { j = Json{{"country", v.country}, {"organization", v.organization}}; }
void from_json(const Json& j, GeoInfo& v) {
  v.country = get_field<std::string>(j, "country");
  v.organization = get_field<std::string>(j, "organization");
}

void to_json(Json& j, const SecurityMechanisms& v) {
  j = Json::object();
  const auto flags = v.flags();
  for (std::size_t i = 0; i < flags.size(); ++i) j[SecurityMechanisms::kNames[i]] = flags[i];
}
void from_json(const Json& j, SecurityMechanisms& v) {
  bool* fields[] = {&v.dnssec, &v.caa, &v.spf, &v.dkim, &v.dmarc, &v.mta_sts, &v.dane};
  for (std::size_t i = 0; i < 7; ++i) *fields[i] = get_field<bool>(j, SecurityMechanisms::kNames[i]);
}

void to_json(Json& j, const DnsSnapshotEntry& v) {
  Json rcodes = Json::object();
  for (const auto& [k, r] : v.rcodes) rcodes[k] = std::string(to_string(r));
  j = Json{{"pld", v.pld},           {"records", v.records},   {"rcodes", rcodes},
           {"a_geo", v.a_geo},       {"aaaa_geo", v.aaaa_geo}, {"security", v.security},
           {"queried_at", v.queried_at}};
}
void from_json(const Json& j, DnsSnapshotEntry& v) {
  v.pld = get_field<std::string>(j, "pld");
  v.records = get_field<std::map<std::string, std::vector<std::string>>>(j, "records");
  v.rcodes.clear();
  for (const auto& [k, r] : get_field<std::map<std::string, std::string>>(j, "rcodes")) v.rcodes[k] = rcode_from_string(r);
  v.a_geo = get_field<std::vector<GeoInfo>>(j, "a_geo");
  v.aaaa_geo = get_field<std::vector<GeoInfo>>(j, "aaaa_geo");
  v.security = get_field<SecurityMechanisms>(j, "security");
  v.queried_at = get_field<TimePoint>(j, "queried_at");
}

}  // namespace dns
}  // namespace dh
