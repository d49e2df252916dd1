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

#include "domainharvester/snapshot_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>

#include "domainharvester/error.hpp"
#include "domainharvester/gzip.hpp"
#include "domainharvester/io.hpp"

namespace dh::store {
namespace fs = std::filesystem;

namespace {

std::string id_name(std::uint64_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(id));
  return buf;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void check_name(const std::string& name) {
  if (name.empty() || name.find('/') != std::string::npos || name.find("..") != std::string::npos) {
    throw Error(Errc::InvalidArgument, "bad store name '" + name + "'");
  }
}

}  // namespace

void IterationSnapshot::validate() const {
  if (dns.size() != web.discovered.size()) {
    throw Error(Errc::CoverageMismatch, "dns covers " + std::to_string(dns.size()) + " PLDs, web discovered " +
                                            std::to_string(web.discovered.size()));
  }
  auto d = dns.begin();
  for (auto w = web.discovered.begin(); w != web.discovered.end(); ++w, ++d) {
    if (w->first != d->first) {
      throw Error(Errc::CoverageMismatch, "dns/web PLD sets differ at " + w->first + " vs " + d->first);
    }
  }
}

void to_json(Json& j, const IterationSnapshot& v) {
  j = Json{{"format", 1},
           {"iteration_id", v.iteration_id},
           {"date", v.date},
           {"seed_list", v.seed_list},
           {"web", v.web},
           {"dns", v.dns},
           {"config_fingerprint", v.config_fingerprint}};
}

void from_json(const Json& j, IterationSnapshot& v) {
  v.iteration_id = get_field<std::uint64_t>(j, "iteration_id");
  v.date = get_field<std::string>(j, "date");
  v.seed_list = get_field<std::string>(j, "seed_list");
  v.web = get_field<web::WebCrawlResult>(j, "web");
  v.dns = get_field<std::map<std::string, dns::DnsSnapshotEntry>>(j, "dns");
  v.config_fingerprint = get_field<std::string>(j, "config_fingerprint");
}

StoreLock::StoreLock(const fs::path& dir) {
  fs::create_directories(dir);
  const auto path = dir / ".lock";
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(Errc::IoError, "cannot open " + path.string());
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(Errc::StoreLocked, "another writer holds " + path.string());
  }
}

StoreLock::~StoreLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

SnapshotStore::SnapshotStore(fs::path root) : root_(std::move(root)) {}

fs::path SnapshotStore::seed_dir(const std::string& seed_list) const {
  check_name(seed_list);
  return root_ / seed_list;
}

fs::path SnapshotStore::iteration_dir(const std::string& seed_list, std::uint64_t id) const {
  return seed_dir(seed_list) / "iterations" / id_name(id);
}

std::vector<IndexEntry> SnapshotStore::index(const std::string& seed_list) const {
  const auto path = seed_dir(seed_list) / "index.json";
  if (!fs::exists(path)) return {};
  const auto doc = parse_json(read_file(path), path.string());
  std::vector<IndexEntry> out;
  for (const auto& e : doc.at("iterations")) {
    out.push_back({get_field<std::uint64_t>(e, "iteration_id"), get_field<std::string>(e, "date")});
  }
  return out;
}

void SnapshotStore::write_index(const std::string& seed_list, const std::vector<IndexEntry>& entries) {
  Json doc{{"seed_list", seed_list}, {"iterations", Json::array()}};
  for (const auto& e : entries) doc["iterations"].push_back({{"iteration_id", e.iteration_id}, {"date", e.date}});
  write_file_atomic(seed_dir(seed_list) / "index.json", doc.dump(2) + "\n");
}

std::uint64_t SnapshotStore::put_snapshot(const IterationSnapshot& s) {
  s.validate();
  auto entries = index(s.seed_list);
  for (const auto& e : entries) {
    if (e.iteration_id == s.iteration_id) {
      throw Error(Errc::DuplicateIteration,
                  "iteration " + std::to_string(s.iteration_id) + " already stored for " + s.seed_list);
    }
  }
  if (!entries.empty()) {
    if (s.iteration_id < entries.back().iteration_id) {
      throw Error(Errc::InvalidArgument, "iteration ids must increase");
    }
    if (s.date < entries.back().date) throw Error(Errc::InvalidArgument, "iteration dates must not go backwards");
  }
  const auto path = seed_dir(s.seed_list) / "snapshots" / (id_name(s.iteration_id) + ".json.gz");
  if (fs::exists(path)) throw Error(Errc::ImmutableSnapshot, path.string() + " already exists");
  write_file_atomic(path, gzip_compress(Json(s).dump()));
  fs::permissions(path, fs::perms::owner_read | fs::perms::group_read | fs::perms::others_read);
  entries.push_back({s.iteration_id, s.date});
  write_index(s.seed_list, entries);
  return s.iteration_id;
}

IterationSnapshot SnapshotStore::get_snapshot(const std::string& seed_list, std::uint64_t id) const {
  const auto path = seed_dir(seed_list) / "snapshots" / (id_name(id) + ".json.gz");
  if (!fs::exists(path)) {
    throw Error(Errc::MissingArtifact, "no snapshot " + std::to_string(id) + " for " + seed_list);
  }
  return parse_json(gzip_decompress(read_file(path)), path.string()).get<IterationSnapshot>();
}

std::optional<std::uint64_t> SnapshotStore::latest_id(const std::string& seed_list) const {
  const auto entries = index(seed_list);
  if (entries.empty()) return std::nullopt;
  return entries.back().iteration_id;
}

std::pair<IterationSnapshot, IterationSnapshot> SnapshotStore::latest_pair(const std::string& seed_list) const {
  const auto entries = index(seed_list);
  if (entries.size() < 2) {
    throw Error(Errc::InsufficientHistory, seed_list + " has " + std::to_string(entries.size()) +
                                               " snapshot(s), labeling needs two");
  }
  return {get_snapshot(seed_list, entries[entries.size() - 2].iteration_id),
          get_snapshot(seed_list, entries.back().iteration_id)};
}

void SnapshotStore::put_artifact(const std::string& seed_list, std::uint64_t id, const std::string& name,
                                 const Json& doc) {
  const auto text = doc.dump(1) + "\n";
  put_text(seed_list, id, name, text);
}

void SnapshotStore::put_text(const std::string& seed_list, std::uint64_t id, const std::string& name,
                             const std::string& text) {
  check_name(name);
  const auto path = iteration_dir(seed_list, id) / name;
  write_file_atomic(path, ends_with(name, ".gz") ? gzip_compress(text) : text);
}

bool SnapshotStore::has_artifact(const std::string& seed_list, std::uint64_t id, const std::string& name) const {
  check_name(name);
  return fs::exists(iteration_dir(seed_list, id) / name);
}

std::string SnapshotStore::get_text(const std::string& seed_list, std::uint64_t id, const std::string& name) const {
  check_name(name);
  const auto path = iteration_dir(seed_list, id) / name;
  if (!fs::exists(path)) throw Error(Errc::MissingArtifact, "missing " + path.string());
  auto raw = read_file(path);
  return ends_with(name, ".gz") ? gzip_decompress(raw) : raw;
}

Json SnapshotStore::get_artifact(const std::string& seed_list, std::uint64_t id, const std::string& name) const {
  return parse_json(get_text(seed_list, id, name), name);
}

std::size_t SnapshotStore::prune(const std::string& seed_list, std::size_t keep_last) {
  auto entries = index(seed_list);
  if (entries.size() <= keep_last) return 0;
  const std::size_t drop = entries.size() - keep_last;
  for (std::size_t i = 0; i < drop; ++i) {
    const auto id = entries[i].iteration_id;
    const auto snap = seed_dir(seed_list) / "snapshots" / (id_name(id) + ".json.gz");
    fs::remove(snap);
    fs::remove_all(iteration_dir(seed_list, id));
  }
  entries.erase(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(drop));
  write_index(seed_list, entries);
  return drop;
}

}  // namespace dh::store
