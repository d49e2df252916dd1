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

#include "doctest.h"
#include "helpers.hpp"

#include <sys/wait.h>

#include "domainharvester/digest.hpp"
#include "domainharvester/error.hpp"
#include "domainharvester/gzip.hpp"
#include "domainharvester/io.hpp"
#include "domainharvester/snapshot_store.hpp"

using namespace dh;
using namespace dh::store;

namespace {

IterationSnapshot snapshot(std::uint64_t id, const std::string& date, const std::vector<std::string>& plds) {
  IterationSnapshot s;
  s.iteration_id = id;
  s.date = date;
  s.seed_list = "unit";
  s.web.seed_list = "unit";
  s.web.iteration_id = id;
  for (const auto& p : plds) {
    s.web.discovered[p].pld = p;
    s.web.discovered[p].access.http_status = 200;
    s.dns[p].pld = p;
    s.dns[p].records["A"] = {"192.0.2.1"};
    s.dns[p].rcodes["A"] = dns::Rcode::NoError;
  }
  s.config_fingerprint = "fp";
  return s;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no dh::Error thrown");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_SUITE("store") {
  TEST_CASE("gzip is deterministic and round-trips") {
    const std::string text(10000, 'a');
    const auto z = gzip_compress(text);
    CHECK(z == gzip_compress(text));
    CHECK(z.size() < text.size());
    CHECK(gzip_decompress(z) == text);
    CHECK(gzip_decompress(gzip_compress("")).empty());
    CHECK_THROWS_AS(gzip_decompress(z.substr(0, z.size() / 2)), Error);
    CHECK_THROWS_AS(gzip_decompress("not gzip"), Error);
  }

  TEST_CASE("sha256 and fnv1a known answers") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    static_assert(fnv1a64("") == 0xcbf29ce484222325ULL);
    static_assert(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  }

  TEST_CASE("atomic file writes replace content") {
    const auto dir = test::scratch("io");
    write_file_atomic(dir / "f.txt", "one");
    write_file_atomic(dir / "f.txt", "two");
    CHECK(read_file(dir / "f.txt") == "two");
    CHECK(code_of([&] { read_file(dir / "missing"); }) == Errc::IoError);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("snapshots round-trip and are immutable") {
    const auto dir = test::scratch("store");
    SnapshotStore st(dir);
    const auto s1 = snapshot(1, "2022-11-11", {"a.com", "b.com"});
    CHECK(st.put_snapshot(s1) == 1);
    CHECK(st.get_snapshot("unit", 1) == s1);
    CHECK(code_of([&] { st.put_snapshot(s1); }) == Errc::DuplicateIteration);
    CHECK(code_of([&] { st.get_snapshot("unit", 5); }) == Errc::MissingArtifact);
    CHECK(code_of([&] { st.latest_pair("unit"); }) == Errc::InsufficientHistory);

    auto bad = snapshot(2, "2022-11-18", {"a.com"});
    bad.dns.erase("a.com");
    CHECK(code_of([&] { st.put_snapshot(bad); }) == Errc::CoverageMismatch);
    CHECK(code_of([&] { st.put_snapshot(snapshot(2, "2022-11-04", {"a.com"})); }) == Errc::InvalidArgument);

    const auto s2 = snapshot(2, "2022-11-18", {"a.com", "c.com"});
    st.put_snapshot(s2);
    CHECK(st.latest_id("unit") == 2u);
    const auto [prev, curr] = st.latest_pair("unit");
    CHECK(prev == s1);
    CHECK(curr == s2);
    CHECK(st.index("unit") == std::vector<IndexEntry>{{1, "2022-11-11"}, {2, "2022-11-18"}});
    CHECK_FALSE(st.latest_id("other"));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("artifacts: JSON, gzip JSON and text") {
    const auto dir = test::scratch("artifacts");
    SnapshotStore st(dir);
    st.put_snapshot(snapshot(1, "2022-11-11", {"a.com"}));
    const Json doc{{"k", 1}, {"list", {1, 2, 3}}};
    st.put_artifact("unit", 1, "doc.json", doc);
    st.put_artifact("unit", 1, "doc.json.gz", doc);
    st.put_text("unit", 1, "list.txt", "a.com\n");
    CHECK(st.get_artifact("unit", 1, "doc.json") == doc);
    CHECK(st.get_artifact("unit", 1, "doc.json.gz") == doc);
    CHECK(st.get_text("unit", 1, "list.txt") == "a.com\n");
    CHECK(st.has_artifact("unit", 1, "doc.json"));
    CHECK_FALSE(st.has_artifact("unit", 1, "nope.json"));
    CHECK(code_of([&] { st.get_artifact("unit", 1, "nope.json"); }) == Errc::MissingArtifact);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("prune keeps the newest iterations") {
    const auto dir = test::scratch("prune");
    SnapshotStore st(dir);
    for (std::uint64_t i = 1; i <= 4; ++i) {
      st.put_snapshot(snapshot(i, format_date(parse_date("2022-11-11") + std::chrono::days(7 * i)), {"a.com"}));
    }
    CHECK(st.prune("unit", 2) == 2);
    CHECK(st.index("unit").size() == 2);
    CHECK(st.index("unit").front().iteration_id == 3);
    CHECK(code_of([&] { st.get_snapshot("unit", 1); }) == Errc::MissingArtifact);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("store lock excludes a second process") {
    const auto dir = test::scratch("lock");
    StoreLock lock(dir);
    const pid_t pid = ::fork();
    if (pid == 0) {
      try {
        StoreLock other(dir);
        ::_exit(0);
      } catch (const Error& e) {
        ::_exit(e.code() == Errc::StoreLocked ? 7 : 1);
      }
    }
    int status = 0;
    ::waitpid(pid, &status, 0);
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 7);
    std::filesystem::remove_all(dir);
  }
}
