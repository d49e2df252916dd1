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

#include <cmath>
#include <thread>

#include "domainharvester/embedder.hpp"
#include "domainharvester/error.hpp"
#include "domainharvester/features.hpp"
#include "domainharvester/kernels.hpp"
#include "domainharvester/snapshot_store.hpp"
#include "httplib.h"

using namespace dh;
using namespace dh::features;

namespace {

store::IterationSnapshot two_domain_snapshot() {
  store::IterationSnapshot s;
  s.iteration_id = 3;
  s.seed_list = "unit";
  auto& a = s.web.discovered["a.com"];
  a.pld = "a.com";
  a.titles = {{"http://a.com/z", "Zed"}, {"http://a.com/", "Home"}};
  a.link_texts = {{"http://seed.com/", "A link"}};
  a.backlinks = {{"seed.com", 300}, {"seed2.com", 1}};
  a.via_https = true;
  a.certificate = web::CertificateInfo{"Issuer Inc", "US", "A Corp", "JP", {}, {}, true};
  auto& b = s.web.discovered["b.com"];
  b.pld = "b.com";
  b.backlinks = {{"seed.com", 1}};
  s.dns["a.com"].pld = "a.com";
  s.dns["a.com"].records = {{"A", {"192.0.2.1", "192.0.2.2"}}, {"NS", {"ns.x.net"}}};
  s.dns["a.com"].a_geo = {{"JP", "Org One"}, {"US", "Org Two"}};
  s.dns["a.com"].security.spf = true;
  s.dns["b.com"].pld = "b.com";
  s.dns["b.com"].records = {{"AAAA", {"2001:db8::1"}}};
  s.dns["b.com"].aaaa_geo = {{"DE", "Org Three"}};
  return s;
}

double norm(const Embedding& v) {
  double n = 0;
  for (float f : v) n += static_cast<double>(f) * f;
  return std::sqrt(n);
}

// Counts requests; answers every text with a one-hot vector.
struct FakeSidecar {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::vector<std::size_t> batch_sizes;
  std::mutex mu;

  FakeSidecar() {
    server.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
      const auto doc = Json::parse(req.body);
      const auto n = doc.at("texts").size();
      {
        std::lock_guard lk(mu);
        batch_sizes.push_back(n);
      }
      Json vectors = Json::array();
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<float> v(kEmbeddingDim, 0.0f);
        v[i % kEmbeddingDim] = 1.0f;
        vectors.push_back(v);
      }
      res.set_content(Json{{"vectors", vectors}, {"model_id", "fake-768"}}.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeSidecar() {
    server.stop();
    thread.join();
  }
};

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("hashing embedder is unit-norm, deterministic and token-sensitive") {
    const auto a = HashingEmbedder::embed_text("Alpha Corp Home");
    CHECK(a.size() == kEmbeddingDim);
    CHECK(norm(a) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(a == HashingEmbedder::embed_text("alpha corp home"));
    CHECK(a != HashingEmbedder::embed_text("Beta Corp Home"));
    CHECK(norm(HashingEmbedder::embed_text("")) == doctest::Approx(1.0).epsilon(1e-6));
    HashingEmbedder e;
    CHECK(e.model_id() == "hashing-v1-768");
    CHECK(e.embed_batch({"x", "y"}).size() == 2);
    CHECK(HashingEmbedder::tokenize("Hello, World!") ==
          std::vector<std::string>{"hello", "world"});
  }

  TEST_CASE("texts are ordered by URL and truncated by bytes") {
    const auto s = two_domain_snapshot();
    CHECK(title_text(s.web.discovered.at("a.com")) == "Home Zed");
    CHECK(title_text(s.web.discovered.at("a.com"), 6) == "Home Z");
    CHECK(link_text(s.web.discovered.at("a.com")) == "A link");
    CHECK(title_text(s.web.discovered.at("b.com")).empty());
  }

  TEST_CASE("vocabularies are sorted per categorical group") {
    const auto v = build_vocabs(two_domain_snapshot());
    REQUIRE(v.size() == kCategoricalGroups.size());
    CHECK(v[0].group == Group::Backlinks);
    CHECK(v[0].values == std::vector<std::string>{"seed.com", "seed2.com"});
    CHECK(v[0].built_from == 3);
    CHECK(v[5].group == Group::ACountry);
    CHECK(v[5].values == std::vector<std::string>{"JP", "US"});
    CHECK(v[8].values == std::vector<std::string>{"Org Three"});
  }

  TEST_CASE("matrix layout and values") {
    const auto s = two_domain_snapshot();
    HashingEmbedder e;
    FeatureOptions opt;
    const auto m = extract_features(s, build_vocabs(s), e, opt);
    CHECK(m.rows() == 2);
    CHECK(m.plds == std::vector<std::string>{"a.com", "b.com"});
    CHECK(m.iteration_id == 3);
    CHECK(m.embedder_model == "hashing-v1-768");
    CHECK(m.group_range(Group::TitleEmb) == std::pair<std::size_t, std::size_t>{0, 768});
    CHECK(m.group_range(Group::LinkTextEmb) == std::pair<std::size_t, std::size_t>{768, 1536});
    CHECK(m.columns[1536] == "backlinks:seed.com");
    CHECK(m.at(0, 1536) == 255);  // capped
    CHECK(m.at(0, 1537) == 1);
    CHECK(m.at(1, 1536) == 1);

    const auto [d0, d1] = m.group_range(Group::DnsCounts);
    CHECK(d1 - d0 == 5);
    CHECK(m.columns[d0] == "dns_counts:NS");
    CHECK(m.at(0, d0) == 1);
    CHECK(m.at(0, d0 + 1) == 2);
    CHECK(m.at(1, d0 + 2) == 1);
    const auto [s0, s1] = m.group_range(Group::SecMechanisms);
    CHECK(s1 - s0 == 7);
    CHECK(m.at(0, s0 + 2) == 1);
    CHECK(m.columns[s0 + 2] == "sec_mechanisms:SPF");

    const auto [c0, c1] = m.group_range(Group::CertIssuerOrg);
    CHECK(c1 - c0 == 1);
    CHECK(m.at(0, c0) == 1);
    CHECK(m.at(1, c0) == 0);

    opt.binary_backlinks = true;
    CHECK(extract_features(s, build_vocabs(s), e, opt).at(0, 1536) == 1);
    opt.mode = kernels::ExecMode::Serial;
    opt.binary_backlinks = false;
    CHECK(extract_features(s, build_vocabs(s), e, opt) == m);
  }

  TEST_CASE("schema fingerprint follows the columns and a stale vocabulary zero-fills") {
    const auto s = two_domain_snapshot();
    HashingEmbedder e;
    auto vocabs = build_vocabs(s);
    const auto m = extract_features(s, vocabs, e);
    CHECK(m.schema_fingerprint().size() == 64);
    vocabs[0].values.push_back("seed3.com");
    const auto wider = extract_features(s, vocabs, e);
    CHECK(wider.width() == m.width() + 1);
    CHECK(wider.schema_fingerprint() != m.schema_fingerprint());
    CHECK(wider.at(0, 1538) == 0);
  }

  TEST_CASE("subset and row_index") {
    const auto s = two_domain_snapshot();
    HashingEmbedder e;
    const auto m = extract_features(s, build_vocabs(s), e);
    CHECK(m.row_index("b.com") == 1u);
    CHECK_FALSE(m.row_index("c.com"));
    const auto sub = m.subset({"b.com"});
    CHECK(sub.rows() == 1);
    CHECK(std::equal(sub.row(0).begin(), sub.row(0).end(), m.row(1).begin()));
  }

  TEST_CASE("select_features keeps embeddings and the top-k scalar columns") {
    const auto s = two_domain_snapshot();
    HashingEmbedder e;
    const auto m = extract_features(s, build_vocabs(s), e);
    CHECK(select_features(m, std::nullopt, 1) == m);
    const ColumnImportance prior{{"dns_counts:A", 5.0}, {"backlinks:seed2.com", 9.0}, {"title_emb:3", 100.0}};
    const auto sel = select_features(m, prior, 2);
    CHECK(sel.width() == 2 * kEmbeddingDim + 2);
    CHECK(sel.columns[1536] == "backlinks:seed2.com");
    CHECK(sel.columns[1537] == "dns_counts:A");
    CHECK(sel.at(0, 1537) == 2);
    CHECK(select_features(m, prior, 100000) == m);
  }

  TEST_CASE("group importance sums per group") {
    const auto s = two_domain_snapshot();
    HashingEmbedder e;
    const auto m = extract_features(s, build_vocabs(s), e);
    std::vector<double> imp(m.width(), 0.0);
    imp[0] = 1;
    imp[1536] = 2;
    imp[1537] = 3;
    const auto g = group_importance(m, imp);
    CHECK(g.size() == kGroupCount);
    CHECK(g.at(Group::TitleEmb) == 1);
    CHECK(g.at(Group::Backlinks) == 5);
    CHECK(g.at(Group::AOrg) == 0);
    CHECK_THROWS_AS(group_importance(m, {1.0}), Error);
  }

  TEST_CASE("group names round trip") {
    for (std::size_t i = 0; i < kGroupCount; ++i) {
      const auto g = static_cast<Group>(i);
      CHECK(group_from_string(to_string(g)) == g);
    }
    CHECK(is_embedding(Group::TitleEmb));
    CHECK_FALSE(is_embedding(Group::DnsCounts));
  }

  TEST_CASE("row fill kernels agree") {
    std::vector<float> t(8), l(8);
    for (int i = 0; i < 8; ++i) {
      t[i] = static_cast<float>(i) * 0.5f;
      l[i] = -static_cast<float>(i);
    }
    std::vector<kernels::RowSpec> rows(50);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      rows[r].title = t.data();
      rows[r].link = l.data();
      rows[r].embedding_dim = 8;
      rows[r].sparse = {{16u + static_cast<std::uint32_t>(r % 4), static_cast<double>(r)}};
    }
    std::vector<double> a(50 * 20, -1), b(50 * 20, -2);
    kernels::fill_rows_serial(rows, 20, a.data());
    kernels::fill_rows_omp(rows, 20, b.data());
    CHECK(a == b);
    CHECK(a[3] == 1.5);
    CHECK(a[8 + 3] == -3);
    CHECK(a[20 * 7 + 16 + 3] == 7);
    CHECK(a[20 * 7 + 16] == 0);
  }

  TEST_CASE("remote embedder batches at most 64 texts per request") {
    FakeSidecar sidecar;
    RemoteEmbedder e({"http://127.0.0.1:" + std::to_string(sidecar.port) + "/", 64, Duration{5000}});
    CHECK(e.model_id().rfind("remote:", 0) == 0);
    std::vector<std::string> texts(150, "t");
    const auto out = e.embed_batch(texts);
    CHECK(out.size() == 150);
    CHECK(out[65][1] == 1.0f);
    CHECK(sidecar.batch_sizes == std::vector<std::size_t>{64, 64, 22});
    CHECK(e.model_id() == "fake-768");
    CHECK_THROWS_AS(RemoteEmbedder({"http://127.0.0.1:1", 65, Duration{1000}}), Error);
    CHECK_THROWS_AS(RemoteEmbedder({"ftp://x", 8, Duration{1000}}), Error);
  }

  TEST_CASE("remote embedder failures surface as EmbedderFailure") {
    RemoteEmbedder dead({"http://127.0.0.1:1", 8, Duration{1000}});
    try {
      dead.embed_batch({"x"});
      FAIL("expected EmbedderFailure");
    } catch (const Error& err) {
      CHECK(err.code() == Errc::EmbedderFailure);
    }
  }
}
