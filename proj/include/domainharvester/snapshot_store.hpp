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
#include <string>
#include <utility>
#include <vector>

#include "domainharvester/dnscrawl.hpp"
#include "domainharvester/serialize.hpp"
#include "domainharvester/webcrawl.hpp"

namespace dh::store {

struct IterationSnapshot {
  std::uint64_t iteration_id = 0;
  std::string date;  // YYYY-MM-DD
  std::string seed_list;
  web::WebCrawlResult web;
  std::map<std::string, dns::DnsSnapshotEntry> dns;
  std::string config_fingerprint;

  // Throws CoverageMismatch unless dns keys equal web.discovered keys.
  void validate() const;

  friend bool operator==(const IterationSnapshot&, const IterationSnapshot&) = default;
};

void to_json(Json& j, const IterationSnapshot& v);
void from_json(const Json& j, IterationSnapshot& v);

struct IndexEntry {
  std::uint64_t iteration_id = 0;
  std::string date;

  friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

// Exclusive advisory lock on one seed list's directory. Throws StoreLocked
// if another process holds it.
class StoreLock {
 public:
  explicit StoreLock(const std::filesystem::path& dir);
  ~StoreLock();
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  int fd_ = -1;
};

// Layout:
//   <root>/<seed_list>/index.json
//   <root>/<seed_list>/snapshots/000001.json.gz   (read-only once written)
//   <root>/<seed_list>/iterations/000001/<artifact>
class SnapshotStore {
 public:
  explicit SnapshotStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path seed_dir(const std::string& seed_list) const;
  std::filesystem::path iteration_dir(const std::string& seed_list, std::uint64_t id) const;

  // Throws CoverageMismatch, DuplicateIteration, InvalidArgument (id or date
  // going backwards).
  std::uint64_t put_snapshot(const IterationSnapshot& s);
  // Throws MissingArtifact.
  IterationSnapshot get_snapshot(const std::string& seed_list, std::uint64_t id) const;
  std::vector<IndexEntry> index(const std::string& seed_list) const;
  std::optional<std::uint64_t> latest_id(const std::string& seed_list) const;
  // Throws InsufficientHistory with fewer than two snapshots.
  std::pair<IterationSnapshot, IterationSnapshot> latest_pair(const std::string& seed_list) const;

  // Derived per-iteration documents. Names ending in ".gz" are compressed.
  void put_artifact(const std::string& seed_list, std::uint64_t id, const std::string& name, const Json& doc);
  void put_text(const std::string& seed_list, std::uint64_t id, const std::string& name, const std::string& text);
  bool has_artifact(const std::string& seed_list, std::uint64_t id, const std::string& name) const;
  // Throws MissingArtifact.
  Json get_artifact(const std::string& seed_list, std::uint64_t id, const std::string& name) const;
  std::string get_text(const std::string& seed_list, std::uint64_t id, const std::string& name) const;

  // Keeps the newest keep_last iterations; returns how many were removed.
  std::size_t prune(const std::string& seed_list, std::size_t keep_last);

 private:
  void write_index(const std::string& seed_list, const std::vector<IndexEntry>& entries);

  std::filesystem::path root_;
};

}  // namespace dh::store
