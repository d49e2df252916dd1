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

#include <fstream>
#include <sstream>

#include "domainharvester/cli.hpp"
#include "domainharvester/pipeline.hpp"

using namespace dh;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "dh");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Published weekly rows of the Japan seed list, as printed.
const std::vector<std::string> kJapanRows = {
    "1 2022-09-30 3,735 95,273 - - - - - - - - - - - - -",
    "2 2022-10-07 3,735 97,289 295 1,491 144 37 191 2,158 2,158 4,316 92,973 89,162 3,811 3,811 0",
    "3 2022-10-14 3,735 97,542 301 1,479 154 17 194 2,145 2,145 4,290 93,252 85,313 7,939 6,912 2,784",
    "4 2022-10-21 3,735 97,013 777 1,477 137 24 166 2,581 2,581 5,162 91,851 87,961 3,890 2,876 6,925",
    "5 2022-10-28 3,735 97,574 311 1,465 127 20 203 2,126 2,126 4,252 93,322 45,669 47,653 44,726 963",
    "6 2022-11-04 3,735 98,262 413 1,451 134 11 174 2,183 2,183 4,366 93,896 70,138 23,758 6,959 30,854",
    "7 2022-11-11 3,735 97,488 230 1,436 138 29 171 2,004 2,004 4,008 93,480 47,095 46,385 29,409 6,782",
    "8 2022-11-18 3,735 97,866 249 1,424 143 19 205 2,040 2,040 4,080 93,786 91,083 2,703 509 44,191",
    "9 2022-11-25 3,735 98,108 339 1,195 179 11 201 1,925 1,925 3,850 94,258 79,200 15,058 14,656 2,301",
};

std::int64_t number(const std::string& s) {
  std::string digits;
  for (char c : s) {
    if (c != ',') digits.push_back(c);
  }
  return std::stoll(digits);
}

// Stores one empty snapshot plus a summary per published row.
void seed_japan_store(const std::filesystem::path& root) {
  store::SnapshotStore st(root);
  for (const auto& row : kJapanRows) {
    const auto t = tokens(row);
    store::IterationSnapshot snap;
    snap.iteration_id = static_cast<std::uint64_t>(number(t[0]));
    snap.date = t[1];
    snap.seed_list = "japan";
    snap.web.seed_list = "japan";
    st.put_snapshot(snap);

    pipeline::IterationSummary s;
    s.iteration_id = snap.iteration_id;
    s.date = t[1];
    s.seed_urls = static_cast<std::size_t>(number(t[2]));
    s.discovered = static_cast<std::size_t>(number(t[3]));
    s.labeled = t[4] != "-";
    if (s.labeled) {
      for (std::size_t i = 0; i < 5; ++i) s.counts[i] = static_cast<std::size_t>(number(t[4 + i]));
      s.accounting = listgen::account(number(t[3]), number(t[9]), number(t[10]), number(t[13]));
      s.added = static_cast<std::size_t>(number(t[15]));
      s.removed = static_cast<std::size_t>(number(t[16]));
      s.model_applied = true;
    }
    st.put_artifact("japan", s.iteration_id, pipeline::kSummaryArtifact, s);
  }
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("report replays the Japan weekly table") {
    const auto root = test::scratch("cli_japan");
    seed_japan_store(root);
    const auto r = run({"--store", root.string(), "report", "--seed-list", "japan"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.err.empty());
    const auto out = lines(r.out);
    REQUIRE(out.size() == kJapanRows.size() + 1);
    CHECK(tokens(out[0]) == tokens("Week Date URLs A DNS Cert Access Backlink Parking B C D E F G + -"));
    for (std::size_t i = 0; i < kJapanRows.size(); ++i) {
      CAPTURE(i);
      CHECK(tokens(out[i + 1]) == tokens(kJapanRows[i]));
    }
    CHECK(r.out.find("warning") == std::string::npos);

    const auto j = run({"--store", root.string(), "--json", "report", "--seed-list", "japan"});
    CHECK(j.code == cli::kExitOk);
    const auto doc = Json::parse(j.out);
    CHECK(doc.at("rows").size() == 9);
    CHECK(doc.at("rows").back().get<pipeline::IterationSummary>().accounting.g == 15058);
    CHECK(doc.at("warnings").empty());
    std::filesystem::remove_all(root);
  }

  TEST_CASE("report flags rows that break the accounting identities") {
    const auto root = test::scratch("cli_broken");
    seed_japan_store(root);
    store::SnapshotStore st(root);
    auto s = st.get_artifact("japan", 9, pipeline::kSummaryArtifact).get<pipeline::IterationSummary>();
    s.added = 15601 - 2703 + s.removed;  // G_9 carried forward to 15,601
    st.put_artifact("japan", 9, pipeline::kSummaryArtifact, s);
    const auto r = run({"--store", root.string(), "report", "--seed-list", "japan"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("warning: week 9") != std::string::npos);
    std::filesystem::remove_all(root);
  }

  TEST_CASE("exit codes: configuration errors are 2, missing inputs are 4") {
    CHECK(run({"run"}).code == cli::kExitConfig);
    CHECK(run({"--config", "/nonexistent/config.json", "run"}).code == cli::kExitConfig);
    CHECK(run({"no-such-command"}).code == cli::kExitConfig);
    CHECK(run({}).code == cli::kExitConfig);
    CHECK(run({"--help"}).code == cli::kExitOk);

    const auto empty = test::scratch("cli_empty");
    const auto r = run({"--store", empty.string(), "report", "--seed-list", "nothing"});
    CHECK(r.code == cli::kExitMissing);
    CHECK(r.err.find("error:") == 0);
    CHECK(run({"--store", empty.string(), "compare", "--dhlist", (empty / "missing.txt").string(), "--toplist",
               (test::kFixtures / "toplist_fixture.csv").string(), "--psl",
               (test::kData / "public_suffix_list.dat").string()})
              .code == cli::kExitMissing);
    std::filesystem::remove_all(empty);
  }

  TEST_CASE("pipeline config reads pu settings and rejects bad ranges") {
    const auto root = test::scratch("cli_config");
    { std::ofstream(root / "seeds.txt") << "https://seed.example/\n"; }
    const auto cfg = pipeline::PipelineConfig::parse(
        R"({"seed_list": "s", "seed_file": "seeds.txt", "store": "store",
            "features": {"binary_backlinks": true, "backlink_cap": 9},
            "pu": {"trials": 3, "folds": 4, "auc_tolerance": 0.0, "threshold": 0.2}})",
        root);
    CHECK(cfg.budget.trials == 3);
    CHECK(cfg.budget.folds == 4);
    CHECK(cfg.budget.auc_tolerance == 0.0);
    CHECK(cfg.threshold == 0.2);
    CHECK(cfg.features.binary_backlinks);
    CHECK(cfg.features.backlink_cap == 9);
    CHECK(cfg.features.text_limit_bytes == 8192);
    CHECK(cfg.seed_file == root / "seeds.txt");
    CHECK_NOTHROW(cfg.validate());

    auto bad = cfg;
    bad.budget.auc_tolerance = -0.1;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.budget.folds = 1;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.features.backlink_cap = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.seed_file = root / "missing.txt";
    CHECK_THROWS_AS(bad.validate(), Error);
    std::filesystem::remove_all(root);
  }

  TEST_CASE("compare prints one overlap per top list") {
    const auto psl = (test::kData / "public_suffix_list.dat").string();
    const auto dhlist = (test::kFixtures / "dhlist_fixture.txt").string();
    const auto csv = (test::kFixtures / "toplist_fixture.csv").string();
    const auto txt = (test::kFixtures / "toplist_fixture.txt").string();
    const auto r = run({"compare", "--dhlist", dhlist, "--toplist", csv, "--toplist", txt, "--psl", psl});
    CHECK(r.code == cli::kExitOk);
    CHECK(lines(r.out) == std::vector<std::string>{"toplist_fixture 7 (70.00%)", "toplist_fixture 3 (30.00%)"});

    const auto k = run({"compare", "--dhlist", dhlist, "--toplist", csv, "--k", "5", "--precision", "1", "--psl", psl});
    CHECK(k.out == "toplist_fixture 4 (40.0%)\n");

    const auto j = run({"--json", "compare", "--dhlist", dhlist, "--toplist", csv, "--psl", psl});
    const auto doc = Json::parse(j.out);
    CHECK(doc.at(0).at("count") == 7);
    CHECK(doc.at(0).at("denominator") == 10);

    CHECK(run({"compare", "--dhlist", dhlist, "--toplist", csv, "--format", "xml", "--psl", psl}).code ==
          cli::kExitConfig);
  }
}
