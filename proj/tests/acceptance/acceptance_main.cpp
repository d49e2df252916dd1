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

// Acceptance suite: one PASS/FAIL line per criterion. Run with a criterion id
// to execute only that one.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "domainharvester/classifiers.hpp"
#include "domainharvester/dnscrawl.hpp"
#include "domainharvester/embedder.hpp"
#include "domainharvester/error.hpp"
#include "domainharvester/features.hpp"
#include "domainharvester/fixtureworld.hpp"
#include "domainharvester/labeling.hpp"
#include "domainharvester/listgen.hpp"
#include "domainharvester/metrics.hpp"
#include "domainharvester/pipeline.hpp"
#include "domainharvester/pld.hpp"
#include "domainharvester/pulearn.hpp"
#include "domainharvester/resolver.hpp"
#include "domainharvester/robots.hpp"
#include "domainharvester/webcrawl.hpp"

namespace fs = std::filesystem;
using namespace dh;

namespace {

// Tolerances and limits.
constexpr double kE2eBudgetSeconds = 60.0;
constexpr double kCHatTolerance = 0.1;
constexpr double kMinBoostedAuc = 0.90;
constexpr auto kMinGap = std::chrono::milliseconds(3000);

const fs::path kFixtures = DH_FIXTURE_DIR;
const fs::path kData = DH_DATA_DIR;

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string fmt(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

const pld::SuffixRuleSet& rules() {
  static const auto r = pld::SuffixRuleSet::load(kData / "public_suffix_list.dat");
  return r;
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("dh-acceptance-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ------------------------------------------------------------- end to end

std::string e2e_fixture_run() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto script = fixture::WorldScript::load(kFixtures / "world12.json");
  const auto dir = fresh_dir("e2e");
  std::map<labeling::Category, int> seen;
  std::size_t tp = 0, fp = 0, fn = 0;
  for (int it = 1; it <= script.iterations; ++it) {
    auto world = fixture::serve_world(script, it);
    auto doc = fixture::pipeline_config(script, *world, it, dir);
    auto cfg = pipeline::PipelineConfig::parse(doc.dump(), dir);
    pipeline::Pipeline p(cfg);
    const auto summary = p.run_iteration();
    world->stop();
    require(summary.discovered == fixture::discovered(script, it).size(),
            "iteration " + std::to_string(it) + " discovered " + std::to_string(summary.discovered) + ", script has " +
                std::to_string(fixture::discovered(script, it).size()));
    const auto snap = p.store().get_snapshot(script.seed_list, summary.iteration_id);
    for (const auto& [d, n] : fixture::backlink_counts(script, it)) {
      const auto rec = snap.web.discovered.find(d);
      require(rec != snap.web.discovered.end() && rec->second.backlink_count() == n,
              d + ": backlinks differ from the scripted count in iteration " + std::to_string(it));
    }
    if (it < 2) {
      require(summary.note == "DHList deferred: insufficient history", "first iteration should defer the DHList");
      continue;
    }
    const auto report = p.store()
                            .get_artifact(script.seed_list, summary.iteration_id, pipeline::kLabelsArtifact)
                            .get<labeling::LabelReport>();
    const auto manifest = fixture::mutation_manifest(script, it);
    const auto oracle = fixture::expected_labels(script, it);
    require(manifest == oracle, "scripted state and mutation manifest disagree in iteration " + std::to_string(it));
    std::map<std::string, labeling::Category> got;
    for (const auto& [d, l] : report.labels) {
      if (l.category) got[d] = *l.category;
    }
    for (const auto& [d, c] : got) {
      auto m = manifest.find(d);
      if (m != manifest.end() && m->second == c) {
        ++tp;
        ++seen[c];
      } else {
        ++fp;
      }
    }
    for (const auto& [d, c] : manifest) {
      auto g = got.find(d);
      if (g == got.end() || g->second != c) ++fn;
    }
    require(report.departed.empty(), "no domain should leave the fixture world");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  fs::remove_all(dir);
  const double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0;
  const double recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0;
  require(precision == 1.0 && recall == 1.0,
          "precision " + fmt(precision, 3) + " recall " + fmt(recall, 3) + " (tp " + std::to_string(tp) + ", fp " +
              std::to_string(fp) + ", fn " + std::to_string(fn) + ")");
  for (auto c : labeling::kCategories) {
    require(seen[c] == 1, std::string(labeling::to_string(c)) + " labeled " + std::to_string(seen[c]) + " times");
  }
  require(secs < kE2eBudgetSeconds, "runtime " + fmt(secs, 1) + " s");
  return "precision 1.000 recall 1.000, 5 categories once each, " + fmt(secs, 1) + " s";
}

// ------------------------------------------------------------- accounting

struct PublishedRow {
  const char* table;
  int week;
  std::int64_t a, b, c, d, e, f, g, plus, minus;
};

// Weekly tables as printed.
const std::vector<PublishedRow> kPublished = {
    {"global", 2, 103556, 1636, 1636, 3272, 100284, 96067, 4217, 4217, 0},
    {"global", 3, 103255, 1498, 1498, 2996, 100259, 86619, 13640, 10992, 1569},
    {"japan", 2, 97289, 2158, 2158, 4316, 92973, 89162, 3811, 3811, 0},
    {"japan", 3, 97542, 2145, 2145, 4290, 93252, 85313, 7939, 6912, 2784},
    {"japan", 4, 97013, 2581, 2581, 5162, 91851, 87961, 3890, 2876, 6925},
    {"japan", 5, 97574, 2126, 2126, 4252, 93322, 45669, 47653, 44726, 963},
    {"japan", 6, 98262, 2183, 2183, 4366, 93896, 70138, 23758, 6959, 30854},
    {"japan", 7, 97488, 2004, 2004, 4008, 93480, 47095, 46385, 29409, 6782},
    {"japan", 8, 97866, 2040, 2040, 4080, 93786, 91083, 2703, 509, 44191},
    {"japan", 9, 98108, 1925, 1925, 3850, 94258, 79200, 15058, 14656, 2301},
};

std::string accounting_replay() {
  std::map<std::string, std::int64_t> g_prev;
  for (const auto& r : kPublished) {
    const auto acc = listgen::account(r.a, r.b, r.c, r.f);
    const std::string row = std::string(r.table) + " week " + std::to_string(r.week);
    require(acc.d == r.d, row + ": D " + std::to_string(acc.d));
    require(acc.e == r.e, row + ": E " + std::to_string(acc.e));
    require(acc.g == r.g, row + ": G " + std::to_string(acc.g));
    const auto carried = listgen::carry_forward(g_prev[r.table], r.plus, r.minus);
    require(carried == r.g, row + ": carried G " + std::to_string(carried));
    g_prev[r.table] = acc.g;
  }
  require(listgen::carry_forward(4217, 10992, 1569) == 13640, "4,217 + 10,992 - 1,569 != 13,640");
  return std::to_string(kPublished.size()) + " rows reproduce D, E, G; 4,217 + 10,992 - 1,569 = 13,640";
}

std::string labeling_subtotal() {
  const auto b1 = labeling::aggregate_subtotal({659, 685, 137, 27, 128});
  const auto b2 = labeling::aggregate_subtotal({295, 1491, 144, 37, 191});
  require(b1 == 1636, "global week 2 subtotal " + std::to_string(b1));
  require(b2 == 2158, "japan week 2 subtotal " + std::to_string(b2));
  return "B = 1,636 and 2,158";
}

// ------------------------------------------------------------- PLD

std::string pld_suite() {
  std::ifstream in(kFixtures / "pld_cases.tsv");
  require(bool(in), "pld_cases.tsv missing");
  std::string line;
  int cases = 0, ok = 0;
  std::string first_bad;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const auto host = line.substr(0, tab);
    const auto expected = line.substr(tab + 1);
    ++cases;
    std::string got;
    try {
      got = pld::extract_pld(host, rules()).name;
    } catch (const Error& e) {
      got = e.code() == Errc::NoRegistrableDomain ? "!" : std::string("error:") + e.what();
    }
    if (got == expected) {
      ++ok;
    } else if (first_bad.empty()) {
      first_bad = host + " -> " + got + " (expected " + expected + ")";
    }
  }
  require(cases == 50, "fixture has " + std::to_string(cases) + " cases");
  require(ok == cases, std::to_string(ok) + "/" + std::to_string(cases) + " match; first mismatch " + first_bad);
  require(pld::extract_pld("www.example.co.uk", rules()).name == "example.co.uk", "www.example.co.uk");
  return "50/50 exact, www.example.co.uk -> example.co.uk";
}

// ------------------------------------------------------------- politeness

// Ten hosts, each serving a landing page that links 99 allowed pages and a
// handful of robots-disallowed ones.
class SiteFetcher final : public web::Fetcher {
 public:
  struct Hit {
    std::string host;
    std::string path;
    TimePoint at;
  };

  web::FetchResponse fetch(const web::Url& url, TimePoint at) override {
    hits.push_back({url.host, url.path_and_query(), at});
    web::FetchResponse r;
    r.status.http_status = 200;
    if (url.path == "/robots.txt") {
      r.content_type = "text/plain";
      r.body = "User-agent: *\nDisallow: /private/\nDisallow: /*.pdf$\n";
      return r;
    }
    r.content_type = "text/html";
    std::string html = "<html><head><title>" + url.host + url.path + "</title></head><body>";
    if (url.path == "/") {
      for (int i = 1; i < 100; ++i) html += "<a href=\"/page/" + std::to_string(i) + "\">p</a>";
      for (int i = 0; i < 5; ++i) html += "<a href=\"/private/" + std::to_string(i) + "\">x</a>";
      html += "<a href=\"/report.pdf\">pdf</a>";
    }
    r.body = html + "</body></html>";
    return r;
  }

  std::vector<Hit> hits;
};

std::string politeness() {
  std::string seeds;
  for (int h = 0; h < 10; ++h) seeds += "http://host" + std::to_string(h) + ".example/\n";
  const auto list = web::SeedList::parse(seeds, "polite", rules());
  SiteFetcher fetcher;
  SimulatedClock clock(parse_date("2022-11-11"));
  web::CrawlPolicy policy;
  web::crawl_seed_list(list, policy, fetcher, clock, rules());

  std::size_t pages = 0;
  std::map<std::string, TimePoint> last;
  Duration min_gap = Duration::max();
  for (const auto& hit : fetcher.hits) {
    if (hit.path != "/robots.txt") ++pages;
    require(hit.path.rfind("/private/", 0) != 0 && hit.path != "/report.pdf",
            "robots-disallowed " + hit.host + hit.path + " was fetched");
    if (auto it = last.find(hit.host); it != last.end()) min_gap = std::min(min_gap, hit.at - it->second);
    last[hit.host] = hit.at;
  }
  require(pages == 1000, std::to_string(pages) + " page fetches");
  require(min_gap >= kMinGap, "same-host gap of " + std::to_string(min_gap.count()) + " ms");
  return "1,000 fetches over 10 hosts, min same-host gap " + std::to_string(min_gap.count()) +
         " ms, no disallowed path fetched";
}

// ------------------------------------------------------------- backlinks

store::IterationSnapshot backlink_snapshot(std::uint64_t id, std::size_t linking_seeds) {
  store::IterationSnapshot s;
  s.iteration_id = id;
  s.date = id == 1 ? "2022-11-11" : "2022-11-18";
  s.seed_list = "boundary";
  web::DomainWebRecord target;
  target.pld = "target.example";
  target.access.http_status = 200;
  for (std::size_t i = 0; i < linking_seeds; ++i) target.backlinks["seed" + std::to_string(i) + ".example"] = 1;
  s.web.discovered[target.pld] = target;
  dns::DnsSnapshotEntry d;
  d.pld = target.pld;
  d.records["NS"] = {"ns1.host.example"};
  d.rcodes["NS"] = dns::Rcode::NoError;
  s.dns[target.pld] = d;
  return s;
}

std::string backlink_boundary() {
  const auto cfg = labeling::ParkingConfig::parse("parking-example.net\n");
  auto labeled = [&](std::size_t from, std::size_t to) {
    const auto r = labeling::label_iteration(backlink_snapshot(1, from), backlink_snapshot(2, to), cfg);
    return r.labels.at("target.example").category == labeling::Category::BacklinkDrop;
  };
  require(!labeling::rule_backlink_drop(10, 5), "rule labels 10 -> 5");
  require(labeling::rule_backlink_drop(10, 4), "rule misses 10 -> 4");
  require(!labeled(10, 5), "labeler labels 10 -> 5");
  require(labeled(10, 4), "labeler misses 10 -> 4");
  for (std::size_t n = 1; n <= 200; ++n) {
    for (std::size_t m = 0; m <= n; ++m) {
      const bool expect = 2 * (n - m) > n;  // strictly more than half lost
      require(labeling::rule_backlink_drop(n, m) == expect,
              "rule disagrees at " + std::to_string(n) + " -> " + std::to_string(m));
    }
  }
  return "10 -> 5 kept, 10 -> 4 labeled; strict rule holds for all n <= 200";
}

// ------------------------------------------------------------- PU learning

struct Synthetic {
  std::vector<double> x;
  std::vector<int> truth;
  std::vector<int> s;  // observed label
};

// Two Gaussian classes 3 sigma apart in 10 dimensions; each true positive
// is labeled with probability c.
Synthetic make_synthetic(std::size_t rows, double c, std::uint64_t seed) {
  Synthetic d;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::bernoulli_distribution positive(0.5), keep(c);
  for (std::size_t r = 0; r < rows; ++r) {
    const int y = positive(rng) ? 1 : 0;
    for (int f = 0; f < 10; ++f) d.x.push_back(noise(rng) + (y ? 1.5 : -1.5) * (f < 5 ? 1.0 : 0.2));
    d.truth.push_back(y);
    d.s.push_back(y && keep(rng) ? 1 : 0);
  }
  return d;
}

std::vector<std::string> column_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("f:" + std::to_string(i));
  return out;
}

// Checks every base classifier must satisfy.
void contract(ml::BaseKind kind, const Synthetic& d) {
  const std::string name(ml::to_string(kind));
  const ml::Dataset data{d.x, d.truth.size(), 10, d.truth};
  auto model = ml::make_classifier(kind, ml::default_params(kind));
  require(model->name() == name, name + ": name");
  bool threw = false;
  try {
    model->predict(d.x, 10);
  } catch (const Error&) {
    threw = true;
  }
  require(threw, name + ": predict before fit must throw");
  model->fit(data, 11);
  const auto p = model->predict(d.x, 10);
  require(p.size() == d.truth.size(), name + ": one score per row");
  require(std::all_of(p.begin(), p.end(), [](double v) { return v >= 0 && v <= 1 && std::isfinite(v); }),
          name + ": scores outside [0,1]");
  require(ml::roc_auc(p, d.truth) > 0.95, name + ": training AUC on separable data");
  require(model->feature_importance().size() == 10, name + ": importance width");
  threw = false;
  try {
    model->predict(std::span<const double>(d.x.data(), 9), 9);
  } catch (const Error& e) {
    threw = e.code() == Errc::SchemaMismatch;
  }
  require(threw, name + ": wrong width must raise SchemaMismatch");
  auto again = ml::make_classifier(kind, ml::default_params(kind));
  again->fit(data, 11);
  require(again->predict(d.x, 10) == p, name + ": seeded refit not bit-identical");
  auto serial = ml::make_classifier(kind, ml::default_params(kind), kernels::ExecMode::Serial);
  serial->fit(data, 11);
  require(serial->predict(d.x, 10) == p, name + ": serial and parallel kernels differ");
  const auto restored = ml::TreeClassifier::from_json(model->to_json());
  require(restored->predict(d.x, 10) == p, name + ": JSON round trip changes scores");
}

std::string pu_learning() {
  const auto pu = make_synthetic(2000, 0.5, 2024);
  pu::TuningBudget budget;
  budget.trials = 1;
  const auto model = pu::train_pu(ml::Dataset{pu.x, pu.s.size(), 10, pu.s}, column_names(10),
                                  ml::BaseKind::GradientBoosting, budget);
  require(std::abs(model.c_hat - 0.5) <= kCHatTolerance, "c_hat " + fmt(model.c_hat));

  const auto pn = make_synthetic(2000, 1.0, 7);
  const ml::Dataset separable{pn.x, pn.truth.size(), 10, pn.truth};
  const double auc = pu::cv_auc(separable, ml::BaseKind::GradientBoosting,
                                ml::default_params(ml::BaseKind::GradientBoosting), 5, 42, kernels::ExecMode::Parallel);
  require(auc >= kMinBoostedAuc, "boosted CV AUC " + fmt(auc));

  for (auto kind : {ml::BaseKind::DecisionTree, ml::BaseKind::RandomForest, ml::BaseKind::GradientBoosting}) {
    contract(kind, pn);
  }
  for (auto kind : {ml::BaseKind::DecisionTree, ml::BaseKind::RandomForest}) {
    const auto a = pu::train_pu(ml::Dataset{pu.x, pu.s.size(), 10, pu.s}, column_names(10), kind, budget);
    const auto b = pu::train_pu(ml::Dataset{pu.x, pu.s.size(), 10, pu.s}, column_names(10), kind, budget);
    require(pu::model_to_json(a).dump() == pu::model_to_json(b).dump(),
            std::string(ml::to_string(kind)) + ": seeded PU reruns differ");
  }
  return "c_hat " + fmt(model.c_hat) + ", boosted CV AUC " + fmt(auc) +
         ", contract suite passed by 3 bases, tree and forest reruns bit-identical";
}

// ------------------------------------------------------------- threshold

std::string threshold_semantics() {
  const auto kept = listgen::apply_threshold({{"edge.example", 0.1}, {"below.example", 0.0999}}, 0.1);
  require(kept == std::set<std::string>{"below.example"}, "0.1 must be excluded and 0.0999 included");
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 500);
  for (int map = 0; map < 100; ++map) {
    std::map<std::string, double> scores;
    const int n = size(rng);
    for (int i = 0; i < n; ++i) scores["d" + std::to_string(i) + ".example"] = u(rng);
    double hi = 1e-6 + u(rng) * (1 - 1e-6);
    double lo = 1e-6 + u(rng) * (hi - 1e-6);
    const auto big = listgen::apply_threshold(scores, hi);
    const auto small = listgen::apply_threshold(scores, lo);
    require(std::includes(big.begin(), big.end(), small.begin(), small.end()),
            "lowering the threshold added entries in map " + std::to_string(map));
  }
  return "0.1 excluded, 0.0999 included; monotone over 100 random maps";
}

// ------------------------------------------------------------- overlap

std::string overlap_tool() {
  const std::string formatted = listgen::format_overlap({"global", "majestic", 572, 13640, 0}, 2);
  require(formatted == "572 (4.19%)", "formatted as " + formatted);

  listgen::DHList dh;
  dh.seed_list = "fixture";
  std::ifstream in(kFixtures / "dhlist_fixture.txt");
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) dh.entries[line] = {};
  }
  require(dh.size() == 10, "dhlist fixture size");
  const auto csv = listgen::load_toplist(kFixtures / "toplist_fixture.csv", listgen::TopListFormat::Auto, rules());
  const auto plain = listgen::load_toplist(kFixtures / "toplist_fixture.txt", listgen::TopListFormat::Auto, rules());
  require(csv.normalized.size() == 10, "rank-csv normalized to " + std::to_string(csv.normalized.size()));
  require(plain.normalized.size() == 5, "plain normalized to " + std::to_string(plain.normalized.size()));
  const auto a = listgen::overlap(dh, csv);
  const auto b = listgen::overlap(dh, plain);
  const auto c = listgen::overlap(dh, listgen::top_k(csv, 5));
  require(a.count == 7 && listgen::format_overlap(a) == "7 (70.00%)", "csv overlap " + listgen::format_overlap(a));
  require(b.count == 3 && listgen::format_overlap(b) == "3 (30.00%)", "plain overlap " + listgen::format_overlap(b));
  require(c.count == 4, "top-5 overlap " + std::to_string(c.count));
  require(csv.skipped.at("ip_address") == 2 && csv.skipped.at("no_registrable_domain") == 1 &&
              csv.skipped.at("invalid_entry") == 1,
          "skip reasons");
  for (const auto& [entry, expected] : std::vector<std::pair<std::string, std::string>>{
           {"https://shop.alpha-corp.example/catalog?id=7", "alpha-corp.example"},
           {"WWW.Beta-Corp.Example.", "beta-corp.example"},
           {"http://news.stable-news.example:8080/today", "stable-news.example"},
           {"docs.user.github.io", "user.github.io"}}) {
    require(pld::normalize_entry(entry, rules()).name == expected, entry + " did not normalize to " + expected);
  }
  return "572 (4.19%); fixture intersections 7, 3 and top-5 4 exact; URL/FQDN entries normalized";
}

// ------------------------------------------------------------- features

std::string feature_invariants() {
  dns::Zone zone;
  const std::string d = "counts.example";
  for (int i = 0; i < 4; ++i) zone.add(d, dns::RrType::NS, "ns" + std::to_string(i) + ".host.example");
  for (int i = 0; i < 2; ++i) zone.add(d, dns::RrType::A, "198.51.100." + std::to_string(i + 1));
  for (int i = 0; i < 2; ++i) zone.add(d, dns::RrType::AAAA, "2001:db8::" + std::to_string(i + 1));
  for (int i = 0; i < 6; ++i) zone.add(d, dns::RrType::MX, std::to_string(10 * i) + " mx" + std::to_string(i) + ".counts.example");
  for (int i = 0; i < 7; ++i) zone.add(d, dns::RrType::TXT, "token-" + std::to_string(i));
  dns::ZoneResolver resolver(zone);
  dns::NullGeoProvider geo;
  SimulatedClock clock(parse_date("2022-11-11"));

  store::IterationSnapshot snap;
  snap.iteration_id = 1;
  snap.date = "2022-11-11";
  snap.seed_list = "features";
  for (const std::string name : {"counts.example", "plain.example", "other.example"}) {
    web::DomainWebRecord rec;
    rec.pld = name;
    rec.access.http_status = 200;
    rec.titles = {{"http://" + name + "/", "Title of " + name}};
    if (name == "plain.example") rec.backlinks["seed.example"] = 2;
    snap.web.discovered[name] = rec;
    snap.dns[name] = dns::crawl_domain(name, resolver, geo, clock);
  }
  features::HashingEmbedder embedder;
  const auto m = features::extract_features(snap, features::build_vocabs(snap), embedder);
  for (std::size_t r = 0; r < m.rows(); ++r) require(m.row(r).size() == m.width(), "row width");
  require(m.data.size() == m.rows() * m.width(), "matrix is not rectangular");
  const auto [first, last] = m.group_range(features::Group::DnsCounts);
  std::vector<double> counts;
  for (auto c = first; c < last; ++c) counts.push_back(m.at(*m.row_index(d), c));
  require(counts == std::vector<double>{4, 2, 2, 6, 7}, "dns_counts mismatch");
  const auto back = Json::parse(Json(m).dump()).get<features::FeatureMatrix>();
  require(back == m, "feature matrix JSON round trip");

  for (const std::string& text : std::vector<std::string>{"Alpha Corp | Home", "", "日本語のタイトル", std::string(20000, 'x')}) {
    const auto v = features::HashingEmbedder::embed_text(text);
    require(v.size() == features::kEmbeddingDim, "embedding dimension");
    double norm = 0;
    for (float f : v) norm += static_cast<double>(f) * f;
    require(std::abs(std::sqrt(norm) - 1.0) < 1e-5, "embedding not unit norm");
    require(features::HashingEmbedder::embed_text(text) == v, "embedding not deterministic");
  }
  return "rows equal-width, dns_counts (4,2,2,6,7) round-trips, embeddings 768-dim unit-norm deterministic";
}

struct Criterion {
  const char* id;
  const char* title;
  std::function<std::string()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"e2e", "End-to-end fixture run", e2e_fixture_run},
      {"accounting", "Accounting replay", accounting_replay},
      {"subtotal", "Labeling subtotal", labeling_subtotal},
      {"pld", "PLD suite", pld_suite},
      {"politeness", "Politeness", politeness},
      {"backlink", "Backlink boundary", backlink_boundary},
      {"pu", "PU learning", pu_learning},
      {"threshold", "Threshold semantics", threshold_semantics},
      {"overlap", "Overlap tool", overlap_tool},
      {"features", "Feature invariants", feature_invariants},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && only != c.id) continue;
    ++ran;
    std::string detail;
    bool ok = false;
    try {
      detail = c.run();
      ok = true;
    } catch (const Failure& f) {
      detail = f.what;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "PASS  " : "FAIL  ") << c.title << ": " << detail << std::endl;
    failed += ok ? 0 : 1;
  }
  if (ran == 0) {
    std::cerr << "unknown criterion " << only << "\n";
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
