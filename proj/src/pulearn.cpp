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

#include "domainharvester/pulearn.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "domainharvester/digest.hpp"
#include "domainharvester/error.hpp"
#include "domainharvester/metrics.hpp"

namespace dh::pu {
namespace {

void check_trainable(const ml::Dataset& data) {
  if (data.rows < kMinTrainingRows) {
    throw Error(Errc::InsufficientTrainingData,
                std::to_string(data.rows) + " training rows, need at least " + std::to_string(kMinTrainingRows));
  }
  const auto pos = std::count(data.y.begin(), data.y.end(), 1);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(data.rows)) {
    throw Error(Errc::DegenerateTraining, "all training targets are identical");
  }
  if (pos < 2 || static_cast<std::size_t>(pos) + 2 > data.rows) {
    throw Error(Errc::InsufficientTrainingData, "each class needs at least two rows");
  }
}

struct Split {
  std::vector<double> x;
  std::vector<int> y;
  std::size_t rows = 0;
};

Split take_rows(const ml::Dataset& data, const std::vector<std::size_t>& idx) {
  Split s;
  s.rows = idx.size();
  s.x.reserve(idx.size() * data.cols);
  for (auto i : idx) {
    const auto row = data.x.subspan(i * data.cols, data.cols);
    s.x.insert(s.x.end(), row.begin(), row.end());
    s.y.push_back(data.y[i]);
  }
  return s;
}

ml::HyperParams sample_params(ml::BaseKind kind, const SearchSpace& sp, std::mt19937_64& rng) {
  auto p = ml::default_params(kind);
  p.max_depth = std::uniform_int_distribution<int>(sp.depth_min, sp.depth_max)(rng);
  p.max_leaves = std::uniform_int_distribution<int>(sp.leaves_min, sp.leaves_max)(rng);
  const double lr = std::exp(std::uniform_real_distribution<double>(std::log(sp.lr_min), std::log(sp.lr_max))(rng));
  const int trees = std::uniform_int_distribution<int>(sp.trees_min, sp.trees_max)(rng);
  if (kind == ml::BaseKind::GradientBoosting) p.learning_rate = lr;
  if (kind != ml::BaseKind::DecisionTree) p.n_trees = trees;
  return p;
}

template <typename PerFold>
void for_each_fold(const ml::Dataset& data, int folds, std::uint64_t seed, PerFold&& fn) {
  const auto assignment = stratified_folds(data.y, folds, seed);
  const int k = *std::max_element(assignment.begin(), assignment.end()) + 1;
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < data.rows; ++i) (assignment[i] == f ? test : train).push_back(i);
    fn(take_rows(data, train), take_rows(data, test));
  }
}

}  // namespace

TrainingSet build_training_set(const labeling::LabelReport& report, const features::FeatureMatrix& matrix,
                               std::uint64_t seed, double unlabeled_ratio) {
  if (report.iteration_id != matrix.iteration_id) {
    throw Error(Errc::SnapshotMismatch, "label report and feature matrix come from different iterations");
  }
  if (unlabeled_ratio <= 0) throw Error(Errc::ConfigError, "unlabeled sampling ratio must be positive");
  TrainingSet ts;
  ts.positives = report.labeled();
  auto unknown = report.unknown();
  const auto c = static_cast<std::size_t>(std::llround(static_cast<double>(ts.positives.size()) * unlabeled_ratio));
  if (unknown.size() < c) {
    throw Error(Errc::InsufficientUnknowns,
                std::to_string(unknown.size()) + " unknown domains, sample needs " + std::to_string(c));
  }
  std::mt19937_64 rng(seed);
  std::shuffle(unknown.begin(), unknown.end(), rng);
  ts.unlabeled.assign(unknown.begin(), unknown.begin() + static_cast<std::ptrdiff_t>(c));
  std::sort(ts.unlabeled.begin(), ts.unlabeled.end());

  std::vector<std::string> order = ts.positives;
  order.insert(order.end(), ts.unlabeled.begin(), ts.unlabeled.end());
  ts.matrix = matrix.subset(order);
  ts.targets.assign(ts.positives.size(), 1);
  ts.targets.resize(order.size(), 0);
  return ts;
}

std::vector<int> stratified_folds(std::span<const int> y, int folds, std::uint64_t seed) {
  if (folds < 2) throw Error(Errc::ConfigError, "cross-validation needs at least 2 folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
  const int k = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(folds), std::min(pos.size(), neg.size())));
  if (k < 2) throw Error(Errc::InsufficientTrainingData, "too few rows per class for cross-validation");
  std::mt19937_64 rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<int> out(y.size(), 0);
  for (std::size_t i = 0; i < pos.size(); ++i) out[pos[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < neg.size(); ++i) out[neg[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  return out;
}

namespace {

struct CvScore {
  double auc = 0;
  double log_loss = 0;
};

CvScore cv_score(const ml::Dataset& data, ml::BaseKind kind, const ml::HyperParams& params, int folds,
                 std::uint64_t seed, kernels::ExecMode mode) {
  CvScore out;
  int n = 0;
  for_each_fold(data, folds, seed, [&](const Split& train, const Split& test) {
    auto clf = ml::make_classifier(kind, params, mode);
    clf->fit({train.x, train.rows, data.cols, train.y}, seed);
    const auto s = clf->predict(test.x, data.cols);
    out.auc += ml::roc_auc(s, test.y);
    double ll = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double p = std::clamp(s[i], 1e-12, 1.0 - 1e-12);
      ll -= test.y[i] == 1 ? std::log(p) : std::log(1.0 - p);
    }
    out.log_loss += ll / static_cast<double>(s.size());
    ++n;
  });
  out.auc /= n;
  out.log_loss /= n;
  return out;
}

}  // namespace

double cv_auc(const ml::Dataset& data, ml::BaseKind kind, const ml::HyperParams& params, int folds,
              std::uint64_t seed, kernels::ExecMode mode) {
  return cv_score(data, kind, params, folds, seed, mode).auc;
}

PuModel train_pu(const ml::Dataset& data, const std::vector<std::string>& columns, ml::BaseKind kind,
                 const TuningBudget& budget, kernels::ExecMode mode, std::uint64_t trained_on) {
  check_trainable(data);
  if (columns.size() != data.cols) throw Error(Errc::SchemaMismatch, "column names do not match data width");
  if (budget.trials < 1) throw Error(Errc::ConfigError, "tuning budget needs at least one trial");

  std::mt19937_64 rng(budget.seed);
  std::vector<ml::HyperParams> tried;
  std::vector<CvScore> scores;
  for (int t = 0; t < budget.trials; ++t) {
    tried.push_back(t == 0 ? ml::default_params(kind) : sample_params(kind, budget.space, rng));
    scores.push_back(cv_score(data, kind, tried.back(), budget.folds, budget.seed, mode));
    spdlog::debug("trial {}: cv auc {:.4f} log-loss {:.4f} trees {} lr {:.4f}", t, scores.back().auc,
                  scores.back().log_loss, tried.back().n_trees, tried.back().learning_rate);
  }
  double top_auc = -1;
  for (const auto& s : scores) top_auc = std::max(top_auc, s.auc);
  std::size_t pick = scores.size();
  for (std::size_t t = 0; t < scores.size(); ++t) {
    if (scores[t].auc < top_auc - budget.auc_tolerance) continue;
    if (pick == scores.size() || scores[t].log_loss < scores[pick].log_loss) pick = t;
  }
  const ml::HyperParams best = tried[pick];
  const double best_auc = scores[pick].auc;

  // Stratified 80/20 split for the labeling-frequency estimate.
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < data.rows; ++i) (data.y[i] == 1 ? pos : neg).push_back(i);
  std::mt19937_64 split_rng(budget.seed ^ 0x9e3779b97f4a7c15ULL);
  std::shuffle(pos.begin(), pos.end(), split_rng);
  std::shuffle(neg.begin(), neg.end(), split_rng);
  const auto hold_pos = std::max<std::size_t>(1, pos.size() / 5);
  const auto hold_neg = neg.size() / 5;
  std::vector<std::size_t> train(pos.begin() + static_cast<std::ptrdiff_t>(hold_pos), pos.end());
  train.insert(train.end(), neg.begin() + static_cast<std::ptrdiff_t>(hold_neg), neg.end());
  std::sort(train.begin(), train.end());
  std::vector<std::size_t> held(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(hold_pos));
  std::sort(held.begin(), held.end());

  const auto tr = take_rows(data, train);
  auto clf = ml::make_classifier(kind, best, mode);
  clf->fit({tr.x, tr.rows, data.cols, tr.y}, budget.seed);
  const auto hp = take_rows(data, held);
  const auto held_scores = clf->predict(hp.x, data.cols);
  const double mean = std::accumulate(held_scores.begin(), held_scores.end(), 0.0) /
                      static_cast<double>(held_scores.size());

  PuModel m;
  m.kind = kind;
  m.params = best;
  m.base = std::move(clf);
  m.c_hat = std::clamp(mean, 1e-6, 1.0);
  if (mean <= 0) spdlog::warn("held-out positives scored 0; c_hat clamped to {}", m.c_hat);
  m.columns = columns;
  std::string joined;
  for (const auto& c : columns) {
    joined += c;
    joined.push_back('\n');
  }
  m.schema_fingerprint = sha256_hex(joined);
  m.trained_on = trained_on;
  m.cv_auc = best_auc;
  return m;
}

PuModel train_pu(const TrainingSet& ts, ml::BaseKind kind, const TuningBudget& budget, kernels::ExecMode mode) {
  return train_pu(ts.dataset(), ts.matrix.columns, kind, budget, mode, ts.matrix.iteration_id);
}

double adjust_score(double base_score, double c_hat) { return std::min(1.0, base_score / c_hat); }

std::vector<double> score_rows(const PuModel& model, std::span<const double> x, std::size_t cols) {
  auto s = model.base->predict(x, cols);
  for (auto& v : s) v = adjust_score(v, model.c_hat);
  return s;
}

std::map<std::string, double> score(const PuModel& model, const features::FeatureMatrix& matrix) {
  if (matrix.schema_fingerprint() != model.schema_fingerprint) {
    throw Error(Errc::SchemaMismatch, "feature columns differ from the model's training schema");
  }
  const auto s = score_rows(model, matrix.data, matrix.width());
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < matrix.rows(); ++i) out.emplace(matrix.plds[i], s[i]);
  return out;
}

std::vector<CvRow> evaluate_cv(const ml::Dataset& data, const std::vector<ml::BaseKind>& kinds, int folds,
                               std::uint64_t seed, kernels::ExecMode mode) {
  check_trainable(data);
  std::vector<CvRow> out;
  for (auto kind : kinds) {
    CvRow row{kind};
    int n = 0;
    for_each_fold(data, folds, seed, [&](const Split& train, const Split& test) {
      auto clf = ml::make_classifier(kind, ml::default_params(kind), mode);
      clf->fit({train.x, train.rows, data.cols, train.y}, seed);
      const auto s = clf->predict(test.x, data.cols);
      const auto m = ml::binary_metrics(s, test.y, 0.5);
      row.auc += ml::roc_auc(s, test.y);
      row.recall += m.recall;
      row.precision += m.precision;
      row.f1 += m.f1;
      ++n;
    });
    row.auc /= n;
    row.recall /= n;
    row.precision /= n;
    row.f1 /= n;
    out.push_back(row);
  }
  return out;
}

std::string format_cv_table(const std::vector<CvRow>& rows) {
  std::string out = "Algorithm            AUC      Recall   Precision  F1\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-20s %5.1f%%   %5.1f%%   %5.1f%%     %5.1f%%\n",
                  std::string(ml::to_string(r.kind)).c_str(), 100 * r.auc, 100 * r.recall, 100 * r.precision,
                  100 * r.f1);
    out += buf;
  }
  return out;
}

features::ColumnImportance column_importance(const PuModel& model) {
  if (!model.base || !model.base->tree_based()) {
    throw Error(Errc::UnsupportedBase, "feature importance needs a tree-based model");
  }
  const auto imp = model.base->feature_importance();
  features::ColumnImportance out;
  for (std::size_t i = 0; i < imp.size() && i < model.columns.size(); ++i) out[model.columns[i]] = imp[i];
  return out;
}

std::map<features::Group, double> report_importance(const PuModel& model, const features::FeatureMatrix& schema) {
  if (!model.base || !model.base->tree_based()) {
    throw Error(Errc::UnsupportedBase, "feature importance needs a tree-based model");
  }
  if (schema.schema_fingerprint() != model.schema_fingerprint) {
    throw Error(Errc::SchemaMismatch, "importance schema differs from the model's");
  }
  return features::group_importance(schema, model.base->feature_importance());
}

Json model_to_json(const PuModel& model) {
  return Json{{"kind", std::string(ml::to_string(model.kind))},
              {"params", model.params},
              {"c_hat", model.c_hat},
              {"schema_fingerprint", model.schema_fingerprint},
              {"columns", model.columns},
              {"trained_on", model.trained_on},
              {"cv_auc", model.cv_auc},
              {"base", model.base->to_json()}};
}

PuModel model_from_json(const Json& j) {
  PuModel m;
  m.kind = ml::base_kind_from_string(get_field<std::string>(j, "kind"));
  m.params = get_field<ml::HyperParams>(j, "params");
  m.c_hat = get_field<double>(j, "c_hat");
  m.schema_fingerprint = get_field<std::string>(j, "schema_fingerprint");
  m.columns = get_field<std::vector<std::string>>(j, "columns");
  m.trained_on = get_field<std::uint64_t>(j, "trained_on");
  m.cv_auc = get_field<double>(j, "cv_auc");
  m.base = ml::TreeClassifier::from_json(j.at("base"));
  if (!(m.c_hat > 0 && m.c_hat <= 1)) throw Error(Errc::CorruptArtifact, "model c_hat outside (0, 1]");
  return m;
}

}  // namespace dh::pu
