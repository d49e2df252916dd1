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

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "domainharvester/classifiers.hpp"
#include "domainharvester/clock.hpp"
#include "domainharvester/dnscrawl.hpp"
#include "domainharvester/http_fetcher.hpp"
#include "domainharvester/labeling.hpp"
#include "domainharvester/listgen.hpp"
#include "domainharvester/pulearn.hpp"
#include "domainharvester/serialize.hpp"
#include "domainharvester/snapshot_store.hpp"

namespace dh::pipeline {

// Artifact names inside an iteration directory.
inline constexpr const char* kWebArtifact = "web.json.gz";
inline constexpr const char* kFeaturesArtifact = "features.json.gz";
inline constexpr const char* kLabelsArtifact = "labels.json";
inline constexpr const char* kTrainingArtifact = "training.json";
inline constexpr const char* kModelArtifact = "model.json";
inline constexpr const char* kImportanceArtifact = "importance.json";
inline constexpr const char* kDhListArtifact = "dhlist.json";
inline constexpr const char* kDhListText = "dhlist.txt";
inline constexpr const char* kSummaryArtifact = "summary.json";

// Paths are resolved against the directory of the config file.
struct PipelineConfig {
  std::string seed_list;
  std::filesystem::path seed_file;
  std::filesystem::path store_root;
  std::filesystem::path psl_file;
  web::CrawlPolicy crawl;
  web::HttpFetcherConfig http;
  std::string resolver = "127.0.0.1:53";  // host:port
  Duration resolver_timeout{2000};
  dns::DnsCrawlConfig dns;
  std::filesystem::path geo_file;  // empty: every address is Unknown
  std::string embedder = "builtin";  // or a sidecar base URL
  features::FeatureOptions features;
  double drop_ratio = 0.5;
  std::filesystem::path parking_file;
  ml::BaseKind base = ml::BaseKind::GradientBoosting;
  pu::TuningBudget budget;
  double unlabeled_ratio = 1.0;
  std::uint64_t sample_seed = 7;
  std::size_t top_k_features = 2000;
  double threshold = 0.1;
  std::filesystem::path verdicts_file;  // optional post-filter
  int precision = 2;
  std::optional<TimePoint> now;  // run on a simulated clock starting here
  kernels::ExecMode mode = kernels::ExecMode::Parallel;

  // Throws ConfigError.
  static PipelineConfig parse(std::string_view json_text, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& path);
  // DH_RESOLVER and DH_EMBEDDER_URL.
  void apply_env();
  // Throws ConfigError for missing files or out-of-range values.
  void validate() const;
  // sha256 over the settings that shape crawl output.
  std::string fingerprint() const;
};

// One row of the weekly table.
struct IterationSummary {
  std::uint64_t iteration_id = 0;
  std::string date;
  std::size_t seed_urls = 0;
  std::size_t discovered = 0;  // A
  bool labeled = false;
  std::array<std::size_t, 5> counts{};
  listgen::Accounting accounting;
  std::size_t added = 0;
  std::size_t removed = 0;
  bool model_applied = false;
  std::string note;

  friend bool operator==(const IterationSummary&, const IterationSummary&) = default;
};

void to_json(Json& j, const IterationSummary& v);
void from_json(const Json& j, IterationSummary& v);

// Weekly table: Week, Date, URLs, A, five categories, B..G, +, -. Rows
// without labels print dashes.
std::string format_table(const std::vector<IterationSummary>& rows);

struct OverlapRow {
  std::string top_name;
  std::vector<listgen::OverlapReport> cells;  // one per DHList column
};
std::string format_overlap_table(const std::vector<std::string>& dh_names, const std::vector<OverlapRow>& rows,
                                 int precision = 2);

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);
  ~Pipeline();

  const PipelineConfig& config() const { return config_; }
  store::SnapshotStore& store() { return store_; }
  Clock& clock() { return *clock_; }

  // Id the next crawl will get.
  std::uint64_t next_iteration() const;
  // Each stage wraps failures with its name; partial output stays on disk.
  std::uint64_t crawl_web();
  std::uint64_t crawl_dns();
  features::FeatureMatrix features(std::uint64_t id);
  // Throws MissingArtifact unless an earlier snapshot exists.
  labeling::LabelReport label(std::uint64_t id);
  // Trains and stores a model; returns nullopt when the labels are too few
  // to train on.
  std::optional<pu::PuModel> train(std::uint64_t id);
  listgen::DHList generate(std::uint64_t id);
  IterationSummary summarize(std::uint64_t id);

  // Every stage in order, under the store lock.
  IterationSummary run_iteration();

 private:
  features::FeatureMatrix load_features(std::uint64_t id);
  std::optional<std::uint64_t> previous_id(std::uint64_t id) const;
  pu::TrainingSet load_training_set(std::uint64_t id, const features::FeatureMatrix& matrix);

  PipelineConfig config_;
  store::SnapshotStore store_;
  std::unique_ptr<Clock> clock_;
  std::unique_ptr<pld::SuffixRuleSet> rules_;
};

// Stored summaries in iteration order; iterations without one get a bare row.
std::vector<IterationSummary> load_history(const store::SnapshotStore& store, const std::string& seed_list);

// Human-readable warnings for rows whose numbers break D=B+C, E=A-D, G=E-F
// or G_t = G_{t-1} + added - removed.
std::vector<std::string> check_history(const std::vector<IterationSummary>& rows);

// Parses a DHList reference: an iteration id ("9", "it9") in the store or a
// path to a dhlist.json / plain list file.
listgen::DHList resolve_dhlist(store::SnapshotStore& store, const std::string& seed_list, const std::string& ref);

}  // namespace dh::pipeline
