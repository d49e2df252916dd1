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

#include "domainharvester/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>

#include "domainharvester/error.hpp"
#include "domainharvester/pipeline.hpp"

#ifndef DH_DEFAULT_DATA_DIR
#define DH_DEFAULT_DATA_DIR "data"
#endif

namespace dh::cli {
namespace fs = std::filesystem;

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ConfigError:
    case Errc::InvalidSeedList:
    case Errc::InvalidArgument:
    case Errc::StoreLocked:
      return kExitConfig;
    case Errc::MissingArtifact:
    case Errc::InsufficientHistory:
      return kExitMissing;
    default:
      return kExitStage;
  }
}

struct Globals {
  std::string config_path;
  std::string now;
  std::string store;
  bool json = false;
  bool serial = false;
};

pipeline::PipelineConfig load_config(const Globals& g) {
  if (g.config_path.empty()) throw Error(Errc::ConfigError, "--config is required for this command");
  auto cfg = pipeline::PipelineConfig::load(g.config_path);
  cfg.apply_env();
  if (!g.now.empty()) {
    try {
      cfg.now = g.now.size() == 10 ? parse_date(g.now) : parse_timestamp(g.now);
    } catch (const Error& e) {
      throw Error(Errc::ConfigError, std::string("--now: ") + e.what());
    }
  }
  if (!g.store.empty()) cfg.store_root = g.store;
  if (g.serial) cfg.mode = kernels::ExecMode::Serial;
  return cfg;
}

std::uint64_t pick_iteration(pipeline::Pipeline& p, std::optional<std::uint64_t> requested) {
  if (requested) return *requested;
  auto latest = p.store().latest_id(p.config().seed_list);
  if (!latest) throw Error(Errc::MissingArtifact, "no snapshot stored for " + p.config().seed_list);
  return *latest;
}

void print_summary(std::ostream& out, const pipeline::IterationSummary& s, bool json) {
  if (json) {
    out << Json(s).dump(2) << "\n";
    return;
  }
  out << pipeline::format_table({s});
  if (!s.note.empty()) out << s.note << "\n";
}

pld::SuffixRuleSet load_rules(const Globals& g, const std::string& psl_flag) {
  fs::path psl = psl_flag;
  if (psl.empty() && !g.config_path.empty()) psl = pipeline::PipelineConfig::load(g.config_path).psl_file;
  if (psl.empty()) psl = fs::path(DH_DEFAULT_DATA_DIR) / "public_suffix_list.dat";
  if (!fs::is_regular_file(psl)) throw Error(Errc::ConfigError, "public suffix list not found: " + psl.string());
  return pld::SuffixRuleSet::load(psl);
}

Json overlap_json(const listgen::OverlapReport& r) {
  return Json{{"dhlist", r.dh_name},
              {"toplist", r.top_name},
              {"count", r.count},
              {"denominator", r.denominator},
              {"percentage", r.percentage}};
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"DomainHarvester: weekly allow-list generation from seed URLs", "dh"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Pipeline config (JSON)");
  app.add_option("--now", g.now, "Run on a simulated clock starting at this date or timestamp");
  app.add_option("--store", g.store, "Snapshot store root (overrides the config)");
  app.add_flag("--json", g.json, "Print machine-readable documents");
  app.add_flag("--serial", g.serial, "Use the serial kernels");

  std::optional<std::uint64_t> iteration;
  auto* crawl_web = app.add_subcommand("crawl-web", "Crawl the seed list; stores the web crawl for the next iteration");
  auto* crawl_dns = app.add_subcommand("crawl-dns", "Resolve every discovered PLD and commit the snapshot");
  auto* features = app.add_subcommand("features", "Build the feature matrix of a snapshot");
  auto* label = app.add_subcommand("label", "Label an iteration against the previous snapshot");
  auto* train = app.add_subcommand("train", "Train the PU model of an iteration");
  auto* generate = app.add_subcommand("generate", "Emit the DHList of an iteration");
  auto* compare = app.add_subcommand("compare", "Overlap between a DHList and a top list");
  auto* report = app.add_subcommand("report", "Weekly table of stored iterations");
  auto* run = app.add_subcommand("run", "Run one full iteration");
  for (auto* sub : {features, label, train, generate}) {
    sub->add_option("--iteration", iteration, "Iteration id (default: latest)");
  }
  bool evaluate = false;
  train->add_flag("--evaluate", evaluate, "Also print cross-validated metrics of every base classifier");
  std::optional<double> threshold;
  generate->add_option("--threshold", threshold, "Score threshold in (0,1]");

  std::string dhlist_ref, psl;
  std::vector<std::string> toplists;
  std::size_t k = 0;
  std::string format = "auto";
  std::optional<int> precision;
  compare->add_option("--dhlist", dhlist_ref, "Iteration id (it9) or DHList file")->required();
  compare->add_option("--toplist", toplists, "Top-list file(s)")->required();
  for (auto* sub : {compare, report}) {
    sub->add_option("--k", k, "Keep the k best-ranked entries (0: all)");
    sub->add_option("--format", format, "auto | plain | rank-csv");
    sub->add_option("--precision", precision, "Percentage decimals");
    sub->add_option("--psl", psl, "Public suffix list file");
  }
  std::string seed_list;
  report->add_option("--seed-list", seed_list, "Seed list name (default: from the config)");
  report->add_option("--toplist", toplists, "Top-list file(s) for an overlap table");
  report->add_option("--dhlist", dhlist_ref, "DHList for the overlap table (default: latest with one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*crawl_web || *crawl_dns || *features || *label || *train || *generate || *run) {
      auto cfg = load_config(g);
      if (threshold) cfg.threshold = *threshold;
      pipeline::Pipeline p(std::move(cfg));
      if (*run) {
        print_summary(out, p.run_iteration(), g.json);
      } else if (*crawl_web) {
        store::StoreLock lock(p.store().seed_dir(p.config().seed_list));
        const auto id = p.crawl_web();
        out << "web crawl stored for iteration " << id << "\n";
      } else if (*crawl_dns) {
        store::StoreLock lock(p.store().seed_dir(p.config().seed_list));
        const auto id = p.crawl_dns();
        out << "snapshot " << id << " committed\n";
      } else if (*features) {
        const auto m = p.features(pick_iteration(p, iteration));
        out << m.rows() << " rows x " << m.width() << " columns, schema " << m.schema_fingerprint().substr(0, 12)
            << "\n";
      } else if (*label) {
        const auto r = p.label(pick_iteration(p, iteration));
        if (g.json) {
          out << Json(r).dump(2) << "\n";
        } else {
          for (auto c : labeling::kCategories) out << labeling::to_string(c) << " " << r.count(c) << "\n";
          out << "subtotal " << r.subtotal << "\n";
        }
      } else if (*train) {
        const auto id = pick_iteration(p, iteration);
        const auto model = p.train(id);
        if (!model) {
          out << "no model trained for iteration " << id << "\n";
        } else if (g.json) {
          out << pu::model_to_json(*model).dump(2) << "\n";
        } else {
          out << ml::to_string(model->kind) << " cv_auc " << model->cv_auc << " c_hat " << model->c_hat << "\n";
        }
        if (evaluate) {
          const auto doc = p.store().get_artifact(p.config().seed_list, id, pipeline::kTrainingArtifact);
          auto matrix = p.store().get_artifact(p.config().seed_list, id, pipeline::kFeaturesArtifact)
                            .get<features::FeatureMatrix>();
          auto order = doc.at("positives").get<std::vector<std::string>>();
          const auto n_pos = order.size();
          for (const auto& u : doc.at("unlabeled")) order.push_back(u.get<std::string>());
          const auto sub = matrix.subset(order);
          std::vector<int> y(order.size(), 0);
          std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_pos), 1);
          const auto rows = pu::evaluate_cv(
              {sub.data, sub.rows(), sub.width(), y},
              {ml::BaseKind::DecisionTree, ml::BaseKind::RandomForest, ml::BaseKind::GradientBoosting},
              p.config().budget.folds, p.config().budget.seed, p.config().mode);
          out << pu::format_cv_table(rows);
        }
      } else if (*generate) {
        const auto list = p.generate(pick_iteration(p, iteration));
        if (g.json) {
          out << Json(list).dump(2) << "\n";
        } else {
          out << list.size() << " domains (+" << list.added.size() << " -" << list.removed.size() << ")\n";
          if (!list.note.empty()) out << list.note << "\n";
        }
      }
      return kExitOk;
    }

    const auto fmt = listgen::toplist_format_from_string(format);
    if (*compare) {
      const auto rules = load_rules(g, psl);
      std::string name;
      fs::path store_root = g.store;
      if (!g.config_path.empty()) {
        const auto cfg = pipeline::PipelineConfig::load(g.config_path);
        name = cfg.seed_list;
        if (store_root.empty()) store_root = cfg.store_root;
      }
      store::SnapshotStore store(store_root.empty() ? fs::path("store") : store_root);
      const auto dh = pipeline::resolve_dhlist(store, name, dhlist_ref);
      const int prec = precision.value_or(2);
      Json docs = Json::array();
      for (const auto& path : toplists) {
        auto top = listgen::load_toplist(path, fmt, rules);
        if (k) top = listgen::top_k(top, k);
        const auto r = listgen::overlap(dh, top);
        docs.push_back(overlap_json(r));
        if (!g.json) out << top.name << " " << listgen::format_overlap(r, prec) << "\n";
      }
      if (g.json) out << docs.dump(2) << "\n";
      return kExitOk;
    }

    if (*report) {
      fs::path store_root = g.store;
      int prec = precision.value_or(2);
      if (!g.config_path.empty()) {
        const auto cfg = pipeline::PipelineConfig::load(g.config_path);
        if (seed_list.empty()) seed_list = cfg.seed_list;
        if (store_root.empty()) store_root = cfg.store_root;
        if (!precision) prec = cfg.precision;
      }
      if (seed_list.empty()) throw Error(Errc::ConfigError, "--seed-list or --config is required");
      store::SnapshotStore store(store_root.empty() ? fs::path("store") : store_root);
      const auto rows = pipeline::load_history(store, seed_list);
      if (rows.empty()) throw Error(Errc::MissingArtifact, "no iterations stored for " + seed_list);
      const auto warnings = pipeline::check_history(rows);
      Json doc{{"seed_list", seed_list}, {"rows", rows}, {"warnings", warnings}};
      if (!g.json) {
        out << pipeline::format_table(rows);
        for (const auto& w : warnings) out << "warning: " << w << "\n";
      }
      if (!toplists.empty()) {
        std::optional<listgen::DHList> dh;
        if (!dhlist_ref.empty()) {
          dh = pipeline::resolve_dhlist(store, seed_list, dhlist_ref);
        } else {
          for (auto it = rows.rbegin(); it != rows.rend() && !dh; ++it) {
            if (store.has_artifact(seed_list, it->iteration_id, pipeline::kDhListArtifact)) {
              dh = store.get_artifact(seed_list, it->iteration_id, pipeline::kDhListArtifact).get<listgen::DHList>();
            }
          }
        }
        if (!dh) throw Error(Errc::MissingArtifact, "no DHList stored for " + seed_list);
        const auto rules = load_rules(g, psl);
        std::vector<pipeline::OverlapRow> table;
        Json overlaps = Json::array();
        for (const auto& path : toplists) {
          auto top = listgen::load_toplist(path, fmt, rules);
          if (k) top = listgen::top_k(top, k);
          const auto r = listgen::overlap(*dh, top);
          overlaps.push_back(overlap_json(r));
          table.push_back({top.name, {r}});
        }
        doc["overlap"] = overlaps;
        if (!g.json) out << "\n" << pipeline::format_overlap_table({seed_list}, table, prec);
      }
      if (g.json) out << doc.dump(2) << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return kExitOk;
}

}  // namespace dh::cli
