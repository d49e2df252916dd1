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

#include "domainharvester/pipeline.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "domainharvester/digest.hpp"
#include "domainharvester/embedder.hpp"
#include "domainharvester/error.hpp"
#include "domainharvester/features.hpp"
#include "domainharvester/geo.hpp"
#include "domainharvester/io.hpp"
#include "domainharvester/resolver.hpp"

#ifndef DH_DEFAULT_DATA_DIR
#define DH_DEFAULT_DATA_DIR "data"
#endif

namespace dh::pipeline {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigError, what); }

template <typename T>
T opt(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception& e) {
    config_error(std::string("config field '") + key + "': " + e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

web::Endpoint parse_endpoint(const std::string& text, int default_port) {
  web::Endpoint e;
  std::string host = text;
  e.port = default_port;
  if (!host.empty() && host.front() == '[') {
    const auto close = host.find(']');
    if (close == std::string::npos) config_error("bad endpoint " + text);
    if (close + 1 < host.size() && host[close + 1] == ':') e.port = std::atoi(host.c_str() + close + 2);
    host = host.substr(1, close - 1);
  } else if (auto colon = host.rfind(':'); colon != std::string::npos && host.find(':') == colon) {
    e.port = std::atoi(host.c_str() + colon + 1);
    host.resize(colon);
  }
  if (host.empty() || e.port <= 0 || e.port > 65535) config_error("bad endpoint " + text);
  e.address = host;
  return e;
}

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(name) + ": " + e.what());
  }
}

std::unique_ptr<features::Embedder> make_embedder(const std::string& spec) {
  if (spec == "builtin") return std::make_unique<features::HashingEmbedder>();
  return std::make_unique<features::RemoteEmbedder>(features::RemoteEmbedderConfig{spec});
}

std::string dash_or(bool present, std::int64_t v) { return present ? listgen::group_thousands(v) : "-"; }

}  // namespace

// ---------------------------------------------------------------- config

PipelineConfig PipelineConfig::parse(std::string_view json_text, const fs::path& base_dir) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");
  const fs::path data_dir = DH_DEFAULT_DATA_DIR;
  PipelineConfig c;
  c.seed_list = opt<std::string>(j, "seed_list", "");
  c.seed_file = resolve(base_dir, opt<std::string>(j, "seed_file", ""));
  c.store_root = resolve(base_dir, opt<std::string>(j, "store", "store"));
  c.psl_file = resolve(base_dir, opt<std::string>(j, "psl", (data_dir / "public_suffix_list.dat").string()));
  c.geo_file = resolve(base_dir, opt<std::string>(j, "geo", ""));
  c.embedder = opt<std::string>(j, "embedder", c.embedder);
  if (auto now = opt<std::string>(j, "now", ""); !now.empty()) {
    try {
      c.now = now.size() == 10 ? parse_date(now) : parse_timestamp(now);
    } catch (const Error& e) {
      config_error(std::string("now: ") + e.what());
    }
  }
  c.mode = opt<bool>(j, "parallel", true) ? kernels::ExecMode::Parallel : kernels::ExecMode::Serial;

  const Json feat = opt<Json>(j, "features", Json::object());
  c.features.binary_backlinks = opt<bool>(feat, "binary_backlinks", c.features.binary_backlinks);
  c.features.backlink_cap = opt<std::uint32_t>(feat, "backlink_cap", c.features.backlink_cap);
  c.features.text_limit_bytes = opt<std::size_t>(feat, "text_limit_bytes", c.features.text_limit_bytes);

  const Json crawl = opt<Json>(j, "crawl", Json::object());
  c.crawl.max_depth = opt<int>(crawl, "max_depth", c.crawl.max_depth);
  c.crawl.min_host_interval = Duration(opt<std::int64_t>(crawl, "min_host_interval_ms", c.crawl.min_host_interval.count()));
  c.crawl.politeness = opt<bool>(crawl, "politeness", c.crawl.politeness);
  c.crawl.respect_robots = opt<bool>(crawl, "respect_robots", c.crawl.respect_robots);
  c.crawl.per_seed_page_budget = opt<int>(crawl, "page_budget", c.crawl.per_seed_page_budget);
  c.crawl.fetch_timeout = Duration(opt<std::int64_t>(crawl, "timeout_ms", c.crawl.fetch_timeout.count()));
  c.crawl.max_redirects = opt<int>(crawl, "max_redirects", c.crawl.max_redirects);
  c.crawl.user_agent = opt<std::string>(crawl, "user_agent", c.crawl.user_agent);

  const Json http = opt<Json>(j, "http", Json::object());
  const Json overrides = opt<Json>(http, "overrides", Json::object());
  for (const auto& [key, value] : overrides.items()) {
    c.http.overrides[key] = parse_endpoint(value.get<std::string>(), key.starts_with("https") ? 443 : 80);
  }
  if (auto ca = opt<std::string>(http, "ca_file", ""); !ca.empty()) {
    try {
      c.http.extra_ca_pem = read_file(resolve(base_dir, ca));
    } catch (const Error& e) {
      config_error(e.what());
    }
  }
  c.http.use_system_trust = opt<bool>(http, "system_trust", true);

  const Json dns = opt<Json>(j, "dns", Json::object());
  c.resolver = opt<std::string>(dns, "resolver", c.resolver);
  c.resolver_timeout = Duration(opt<std::int64_t>(dns, "timeout_ms", c.resolver_timeout.count()));
  c.dns.max_in_flight = opt<std::size_t>(dns, "max_in_flight", c.dns.max_in_flight);
  c.dns.retries = opt<int>(dns, "retries", c.dns.retries);
  c.dns.dkim_selectors = opt<std::vector<std::string>>(dns, "dkim_selectors", c.dns.dkim_selectors);

  const Json lab = opt<Json>(j, "labeling", Json::object());
  c.drop_ratio = opt<double>(lab, "drop_ratio", c.drop_ratio);
  c.parking_file =
      resolve(base_dir, opt<std::string>(lab, "parking_providers", (data_dir / "parking_providers.txt").string()));

  const Json pu = opt<Json>(j, "pu", Json::object());
  try {
    c.base = ml::base_kind_from_string(opt<std::string>(pu, "base", std::string(ml::to_string(c.base))));
  } catch (const Error& e) {
    config_error(e.what());
  }
  c.budget.trials = opt<int>(pu, "trials", c.budget.trials);
  c.budget.seed = opt<std::uint64_t>(pu, "seed", c.budget.seed);
  c.budget.folds = opt<int>(pu, "folds", c.budget.folds);
  c.budget.auc_tolerance = opt<double>(pu, "auc_tolerance", c.budget.auc_tolerance);
  c.unlabeled_ratio = opt<double>(pu, "unlabeled_ratio", c.unlabeled_ratio);
  c.sample_seed = opt<std::uint64_t>(pu, "sample_seed", c.sample_seed);
  c.top_k_features = opt<std::size_t>(pu, "top_k_features", c.top_k_features);
  c.threshold = opt<double>(pu, "threshold", c.threshold);

  c.verdicts_file = resolve(base_dir, opt<std::string>(opt<Json>(j, "listgen", Json::object()), "verdicts", ""));
  c.precision = opt<int>(opt<Json>(j, "report", Json::object()), "precision", c.precision);
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    config_error(e.what());
  }
  return parse(text, fs::absolute(path).parent_path());
}

void PipelineConfig::apply_env() {
  if (const char* r = std::getenv("DH_RESOLVER"); r && *r) resolver = r;
  if (const char* e = std::getenv("DH_EMBEDDER_URL"); e && *e) embedder = e;
}

void PipelineConfig::validate() const {
  if (seed_list.empty()) config_error("seed_list name is required");
  if (seed_list.find('/') != std::string::npos || seed_list.starts_with(".")) {
    config_error("seed_list name must be a plain directory name");
  }
  if (seed_file.empty() || !fs::is_regular_file(seed_file)) config_error("seed file not found: " + seed_file.string());
  if (!fs::is_regular_file(psl_file)) config_error("public suffix list not found: " + psl_file.string());
  if (!geo_file.empty() && !fs::is_regular_file(geo_file)) config_error("geo file not found: " + geo_file.string());
  if (!fs::is_regular_file(parking_file)) config_error("parking provider file not found: " + parking_file.string());
  if (!verdicts_file.empty() && !fs::is_regular_file(verdicts_file)) {
    config_error("verdict file not found: " + verdicts_file.string());
  }
  crawl.validate();
  listgen::validate_threshold(threshold);
  if (!(drop_ratio > 0 && drop_ratio < 1)) config_error("drop_ratio must be in (0,1)");
  if (unlabeled_ratio <= 0) config_error("unlabeled_ratio must be positive");
  if (budget.trials < 1 || budget.folds < 2) config_error("pu budget needs trials >= 1 and folds >= 2");
  if (budget.auc_tolerance < 0 || budget.auc_tolerance > 1) config_error("pu auc_tolerance must be in [0, 1]");
  if (features.backlink_cap < 1 || features.text_limit_bytes < 1) config_error("feature caps must be positive");
  if (precision < 0 || precision > 6) config_error("report precision must be in 0..6");
  if (embedder != "builtin" && !embedder.starts_with("http://") && !embedder.starts_with("https://")) {
    config_error("embedder must be 'builtin' or an http(s) URL");
  }
  parse_endpoint(resolver, 53);
}

std::string PipelineConfig::fingerprint() const {
  Json j{{"seed_list", seed_list},
         {"max_depth", crawl.max_depth},
         {"min_host_interval_ms", crawl.min_host_interval.count()},
         {"politeness", crawl.politeness},
         {"respect_robots", crawl.respect_robots},
         {"page_budget", crawl.per_seed_page_budget},
         {"max_redirects", crawl.max_redirects},
         {"user_agent", crawl.user_agent},
         {"dkim_selectors", dns.dkim_selectors},
         {"retries", dns.retries}};
  return sha256_hex(j.dump());
}

// ---------------------------------------------------------------- summaries

void to_json(Json& j, const IterationSummary& v) {
  j = Json{{"iteration_id", v.iteration_id},
           {"date", v.date},
           {"seed_urls", v.seed_urls},
           {"discovered", v.discovered},
           {"labeled", v.labeled},
           {"counts", v.counts},
           {"accounting", v.accounting},
           {"added", v.added},
           {"removed", v.removed},
           {"model_applied", v.model_applied},
           {"note", v.note}};
}

void from_json(const Json& j, IterationSummary& v) {
  v.iteration_id = get_field<std::uint64_t>(j, "iteration_id");
  v.date = get_field<std::string>(j, "date");
  v.seed_urls = get_field<std::size_t>(j, "seed_urls");
  v.discovered = get_field<std::size_t>(j, "discovered");
  v.labeled = get_field<bool>(j, "labeled");
  v.counts = get_field<std::array<std::size_t, 5>>(j, "counts");
  v.accounting = get_field<listgen::Accounting>(j, "accounting");
  v.added = get_field<std::size_t>(j, "added");
  v.removed = get_field<std::size_t>(j, "removed");
  v.model_applied = get_field<bool>(j, "model_applied");
  v.note = get_field<std::string>(j, "note");
}

std::string format_table(const std::vector<IterationSummary>& rows) {
  const std::vector<std::string> header = {"Week", "Date",   "URLs", "A",       "DNS", "Cert", "Access", "Backlink", "Parking",
                                           "B",    "C",      "D",    "E",       "F",   "G",    "+",      "-"};
  std::vector<std::vector<std::string>> cells{header};
  for (const auto& r : rows) {
    const auto& a = r.accounting;
    std::vector<std::string> row = {std::to_string(r.iteration_id), r.date,
                                    listgen::group_thousands(static_cast<std::int64_t>(r.seed_urls)),
                                    listgen::group_thousands(static_cast<std::int64_t>(r.discovered))};
    for (auto c : r.counts) row.push_back(dash_or(r.labeled, static_cast<std::int64_t>(c)));
    for (auto v : {a.b, a.c, a.d, a.e, a.f, a.g}) row.push_back(dash_or(r.labeled, v));
    row.push_back(dash_or(r.labeled, static_cast<std::int64_t>(r.added)));
    row.push_back(dash_or(r.labeled, static_cast<std::int64_t>(r.removed)));
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string pad(width[i] - row[i].size(), ' ');
      line += i == 1 ? row[i] + pad : pad + row[i];
      if (i + 1 < row.size()) line += "  ";
    }
    out += line + "\n";
  }
  return out;
}

std::string format_overlap_table(const std::vector<std::string>& dh_names, const std::vector<OverlapRow>& rows,
                                 int precision) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"Top list"};
  header.insert(header.end(), dh_names.begin(), dh_names.end());
  cells.push_back(header);
  for (const auto& r : rows) {
    std::vector<std::string> row{r.top_name};
    for (const auto& c : r.cells) row.push_back(listgen::format_overlap(c, precision));
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) {
      const std::string pad(width[i] - row[i].size(), ' ');
      line += i == 0 ? row[i] + pad : "  " + pad + row[i];
    }
    out += line + "\n";
  }
  return out;
}

// ---------------------------------------------------------------- pipeline

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)), store_(config_.store_root) {
  config_.validate();
  if (config_.now) {
    clock_ = std::make_unique<SimulatedClock>(*config_.now);
  } else {
    clock_ = std::make_unique<SystemClock>();
  }
  rules_ = std::make_unique<pld::SuffixRuleSet>(pld::SuffixRuleSet::load(config_.psl_file));
  // Fail on a bad seed file before anything is written.
  web::SeedList::load(config_.seed_file, config_.seed_list, *rules_);
}

Pipeline::~Pipeline() = default;

std::uint64_t Pipeline::next_iteration() const { return store_.latest_id(config_.seed_list).value_or(0) + 1; }

std::optional<std::uint64_t> Pipeline::previous_id(std::uint64_t id) const {
  std::optional<std::uint64_t> prev;
  for (const auto& e : store_.index(config_.seed_list)) {
    if (e.iteration_id < id) prev = e.iteration_id;
  }
  return prev;
}

std::uint64_t Pipeline::crawl_web() {
  return stage("crawl-web", [&] {
    const auto seeds = web::SeedList::load(config_.seed_file, config_.seed_list, *rules_);
    const auto id = next_iteration();
    web::HttpFetcherConfig http = config_.http;
    http.user_agent = config_.crawl.user_agent;
    http.timeout = config_.crawl.fetch_timeout;
    web::HttpFetcher fetcher(http);
    auto result = web::crawl_seed_list(seeds, config_.crawl, fetcher, *clock_, *rules_, id);
    store_.put_artifact(config_.seed_list, id, kWebArtifact, Json(result));
    return id;
  });
}

std::uint64_t Pipeline::crawl_dns() {
  return stage("crawl-dns", [&] {
    const auto id = next_iteration();
    if (!store_.has_artifact(config_.seed_list, id, kWebArtifact)) {
      throw Error(Errc::MissingArtifact, "no web crawl pending for iteration " + std::to_string(id));
    }
    store::IterationSnapshot snap;
    snap.iteration_id = id;
    snap.seed_list = config_.seed_list;
    snap.config_fingerprint = config_.fingerprint();
    try {
      snap.web = store_.get_artifact(config_.seed_list, id, kWebArtifact).get<web::WebCrawlResult>();
    } catch (const Json::exception& e) {
      throw Error(Errc::CorruptArtifact, std::string("web crawl artifact: ") + e.what());
    }
    std::set<std::string> plds;
    for (const auto& [p, _] : snap.web.discovered) plds.insert(p);
    const auto endpoint = parse_endpoint(config_.resolver, 53);
    dns::UdpResolver resolver(dns::UdpResolverConfig{endpoint.address, endpoint.port, config_.resolver_timeout});
    std::unique_ptr<dns::GeoProvider> geo;
    if (config_.geo_file.empty()) {
      geo = std::make_unique<dns::NullGeoProvider>();
    } else {
      geo = std::make_unique<dns::FileGeoProvider>(dns::FileGeoProvider::load(config_.geo_file));
    }
    if (!plds.empty()) snap.dns = dns::crawl_dns(plds, resolver, *geo, *clock_, config_.dns);
    snap.date = format_date(clock_->now());
    return store_.put_snapshot(snap);
  });
}

features::FeatureMatrix Pipeline::features(std::uint64_t id) {
  return stage("features", [&] {
    const auto snap = store_.get_snapshot(config_.seed_list, id);
    const auto vocabs = features::build_vocabs(snap);
    auto embedder = make_embedder(config_.embedder);
    auto options = config_.features;
    options.mode = config_.mode;
    auto matrix = features::extract_features(snap, vocabs, *embedder, options);
    std::optional<features::ColumnImportance> prior;
    if (auto prev = previous_id(id); prev && store_.has_artifact(config_.seed_list, *prev, kImportanceArtifact)) {
      prior = store_.get_artifact(config_.seed_list, *prev, kImportanceArtifact).get<features::ColumnImportance>();
    }
    matrix = features::select_features(matrix, prior, config_.top_k_features);
    store_.put_artifact(config_.seed_list, id, kFeaturesArtifact, Json(matrix));
    return matrix;
  });
}

features::FeatureMatrix Pipeline::load_features(std::uint64_t id) {
  const auto doc = store_.get_artifact(config_.seed_list, id, kFeaturesArtifact);
  try {
    return doc.get<features::FeatureMatrix>();
  } catch (const Json::exception& e) {
    throw Error(Errc::CorruptArtifact, std::string("feature matrix: ") + e.what());
  }
}

labeling::LabelReport Pipeline::label(std::uint64_t id) {
  return stage("label", [&] {
    const auto prev = previous_id(id);
    if (!prev) {
      throw Error(Errc::MissingArtifact, "labeling iteration " + std::to_string(id) + " needs an earlier snapshot");
    }
    const auto a = store_.get_snapshot(config_.seed_list, *prev);
    const auto b = store_.get_snapshot(config_.seed_list, id);
    const auto parking = labeling::ParkingConfig::load(config_.parking_file);
    auto report = labeling::label_iteration(a, b, parking, config_.drop_ratio);
    store_.put_artifact(config_.seed_list, id, kLabelsArtifact, Json(report));
    return report;
  });
}

std::optional<pu::PuModel> Pipeline::train(std::uint64_t id) {
  return stage("train", [&]() -> std::optional<pu::PuModel> {
    const auto report = store_.get_artifact(config_.seed_list, id, kLabelsArtifact).get<labeling::LabelReport>();
    const auto matrix = load_features(id);
    const auto ts = pu::build_training_set(report, matrix, config_.sample_seed, config_.unlabeled_ratio);
    Json doc{{"positives", ts.positives}, {"unlabeled", ts.unlabeled}, {"model_applied", false}, {"note", ""}};
    const auto model_path = store_.iteration_dir(config_.seed_list, id) / kModelArtifact;
    if (ts.b() == 0 || ts.d() < pu::kMinTrainingRows) {
      doc["note"] = "model skipped: " + std::to_string(ts.b()) + " labeled, " + std::to_string(ts.d()) +
                    " training rows (minimum " + std::to_string(pu::kMinTrainingRows) + ")";
      fs::remove(model_path);
      store_.put_artifact(config_.seed_list, id, kTrainingArtifact, doc);
      return std::nullopt;
    }
    auto model = pu::train_pu(ts, config_.base, config_.budget, config_.mode);
    model.trained_on = id;
    doc["model_applied"] = true;
    store_.put_artifact(config_.seed_list, id, kModelArtifact, pu::model_to_json(model));
    store_.put_artifact(config_.seed_list, id, kImportanceArtifact, Json(pu::column_importance(model)));
    store_.put_artifact(config_.seed_list, id, kTrainingArtifact, doc);
    return model;
  });
}

pu::TrainingSet Pipeline::load_training_set(std::uint64_t id, const features::FeatureMatrix& matrix) {
  const auto doc = store_.get_artifact(config_.seed_list, id, kTrainingArtifact);
  pu::TrainingSet ts;
  ts.positives = get_field<std::vector<std::string>>(doc, "positives");
  ts.unlabeled = get_field<std::vector<std::string>>(doc, "unlabeled");
  std::vector<std::string> order = ts.positives;
  order.insert(order.end(), ts.unlabeled.begin(), ts.unlabeled.end());
  ts.matrix = matrix.subset(order);
  ts.targets.assign(ts.positives.size(), 1);
  ts.targets.resize(order.size(), 0);
  return ts;
}

listgen::DHList Pipeline::generate(std::uint64_t id) {
  return stage("generate", [&] {
    const auto snap = store_.get_snapshot(config_.seed_list, id);
    const auto matrix = load_features(id);
    const auto report = store_.get_artifact(config_.seed_list, id, kLabelsArtifact).get<labeling::LabelReport>();
    const auto ts = load_training_set(id, matrix);
    const auto training = store_.get_artifact(config_.seed_list, id, kTrainingArtifact);

    std::optional<pu::PuModel> model;
    if (store_.has_artifact(config_.seed_list, id, kModelArtifact)) {
      model = pu::model_from_json(store_.get_artifact(config_.seed_list, id, kModelArtifact));
    }
    std::optional<listgen::DHList> prev;
    if (auto p = previous_id(id); p && store_.has_artifact(config_.seed_list, *p, kDhListArtifact)) {
      prev = store_.get_artifact(config_.seed_list, *p, kDhListArtifact).get<listgen::DHList>();
    }
    std::map<std::string, std::uint32_t> backlinks;
    for (const auto& [p, rec] : snap.web.discovered) backlinks[p] = static_cast<std::uint32_t>(rec.backlink_count());

    listgen::ListOptions options;
    options.threshold = config_.threshold;
    if (!config_.verdicts_file.empty()) options.drop = listgen::load_verdicts(config_.verdicts_file);
    auto list = listgen::generate_dhlist(model ? &*model : nullptr, matrix, report, ts, options,
                                         prev ? &*prev : nullptr, backlinks);
    list.seed_list = config_.seed_list;
    list.date = snap.date;
    if (!model) list.note = training.value("note", std::string());
    store_.put_artifact(config_.seed_list, id, kDhListArtifact, Json(list));
    store_.put_text(config_.seed_list, id, kDhListText, listgen::render_plain(list));
    return list;
  });
}

IterationSummary Pipeline::summarize(std::uint64_t id) {
  return stage("report", [&] {
    const auto snap = store_.get_snapshot(config_.seed_list, id);
    IterationSummary s;
    s.iteration_id = id;
    s.date = snap.date;
    s.seed_urls = snap.web.per_seed.size();
    s.discovered = snap.web.discovered.size();
    if (store_.has_artifact(config_.seed_list, id, kDhListArtifact)) {
      const auto report = store_.get_artifact(config_.seed_list, id, kLabelsArtifact).get<labeling::LabelReport>();
      const auto list = store_.get_artifact(config_.seed_list, id, kDhListArtifact).get<listgen::DHList>();
      s.labeled = true;
      s.counts = report.counts;
      s.accounting = list.accounting;
      s.added = list.added.size();
      s.removed = list.removed.size();
      s.model_applied = list.model_applied;
      s.note = list.note;
    } else {
      s.accounting.a = static_cast<std::int64_t>(s.discovered);
      s.note = "DHList deferred: insufficient history";
    }
    store_.put_artifact(config_.seed_list, id, kSummaryArtifact, Json(s));
    return s;
  });
}

IterationSummary Pipeline::run_iteration() {
  store::StoreLock lock(store_.seed_dir(config_.seed_list));
  crawl_web();
  const auto id = crawl_dns();
  features(id);
  if (previous_id(id)) {
    label(id);
    train(id);
    generate(id);
  }
  return summarize(id);
}

std::vector<IterationSummary> load_history(const store::SnapshotStore& store, const std::string& seed_list) {
  std::vector<IterationSummary> rows;
  for (const auto& e : store.index(seed_list)) {
    if (store.has_artifact(seed_list, e.iteration_id, kSummaryArtifact)) {
      rows.push_back(store.get_artifact(seed_list, e.iteration_id, kSummaryArtifact).get<IterationSummary>());
    } else {
      IterationSummary s;
      s.iteration_id = e.iteration_id;
      s.date = e.date;
      s.note = "no summary stored";
      rows.push_back(s);
    }
  }
  return rows;
}

std::vector<std::string> check_history(const std::vector<IterationSummary>& rows) {
  std::vector<std::string> out;
  const IterationSummary* prev = nullptr;
  for (const auto& r : rows) {
    const auto& a = r.accounting;
    const std::string week = "week " + std::to_string(r.iteration_id) + ": ";
    if (r.labeled) {
      if (a.d != a.b + a.c) out.push_back(week + "D != B + C");
      if (a.e != a.a - a.d) out.push_back(week + "E != A - D");
      if (a.g != a.e - a.f) out.push_back(week + "G != E - F");
      std::size_t b = 0;
      for (auto c : r.counts) b += c;
      if (static_cast<std::int64_t>(b) != a.b) out.push_back(week + "category counts do not sum to B");
      const std::int64_t g_prev = prev && prev->labeled ? prev->accounting.g : 0;
      if (a.g != listgen::carry_forward(g_prev, static_cast<std::int64_t>(r.added),
                                        static_cast<std::int64_t>(r.removed))) {
        out.push_back(week + "G != previous G + added - removed");
      }
    }
    prev = &r;
  }
  return out;
}

listgen::DHList resolve_dhlist(store::SnapshotStore& store, const std::string& seed_list, const std::string& ref) {
  std::string digits = ref.starts_with("it") ? ref.substr(2) : ref;
  const bool numeric = !digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos;
  if (numeric && !fs::exists(ref)) {
    const auto id = std::stoull(digits);
    return store.get_artifact(seed_list, id, kDhListArtifact).get<listgen::DHList>();
  }
  if (!fs::exists(ref)) throw Error(Errc::MissingArtifact, "no DHList at " + ref);
  const auto text = read_file(ref);
  if (ref.ends_with(".json")) {
    try {
      return Json::parse(text).get<listgen::DHList>();
    } catch (const Json::exception& e) {
      throw Error(Errc::CorruptArtifact, ref + ": " + e.what());
    }
  }
  listgen::DHList list;
  list.seed_list = fs::path(ref).stem().string();
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    list.entries[line.substr(b)] = {};
  }
  return list;
}

}  // namespace dh::pipeline
