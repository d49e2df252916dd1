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

// JSON mappings for crawl and DNS observations. Field names here are the
// on-disk format of snapshots; keep them stable.

#include "json.hpp"

#include "domainharvester/clock.hpp"
#include "domainharvester/dnscrawl.hpp"
#include "domainharvester/webcrawl.hpp"

NLOHMANN_JSON_NAMESPACE_BEGIN
template <>
struct adl_serializer<dh::TimePoint> {
  static void to_json(json& j, const dh::TimePoint& t);
  static void from_json(const json& j, dh::TimePoint& t);
};
NLOHMANN_JSON_NAMESPACE_END

namespace dh {

using Json = nlohmann::json;


namespace web {
void to_json(Json& j, const FetchStatus& v);
void from_json(const Json& j, FetchStatus& v);
void to_json(Json& j, const CertificateInfo& v);
void from_json(const Json& j, CertificateInfo& v);
void to_json(Json& j, const PageContent& v);
void from_json(const Json& j, PageContent& v);
void to_json(Json& j, const Outlink& v);
void from_json(const Json& j, Outlink& v);
void to_json(Json& j, const PageObservation& v);
void from_json(const Json& j, PageObservation& v);
void to_json(Json& j, const TitledPage& v);
void from_json(const Json& j, TitledPage& v);
void to_json(Json& j, const LinkReference& v);
void from_json(const Json& j, LinkReference& v);
void to_json(Json& j, const DomainWebRecord& v);
void from_json(const Json& j, DomainWebRecord& v);
void to_json(Json& j, const WebCrawlResult& v);
void from_json(const Json& j, WebCrawlResult& v);
}  // namespace web

namespace dns {
void to_json(Json& j, const GeoInfo& v);
void from_json(const Json& j, GeoInfo& v);
void to_json(Json& j, const SecurityMechanisms& v);
void from_json(const Json& j, SecurityMechanisms& v);
void to_json(Json& j, const DnsSnapshotEntry& v);
void from_json(const Json& j, DnsSnapshotEntry& v);
}  // namespace dns

// Reads a required member, turning type errors into CorruptArtifact.
template <typename T>
T get_field(const Json& j, const char* key);

std::string dump_canonical(const Json& j);
Json parse_json(std::string_view text, const std::string& what);

}  // namespace dh

#include "domainharvester/error.hpp"

template <typename T>
T dh::get_field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptArtifact, std::string("field '") + key + "': " + e.what());
  }
}
