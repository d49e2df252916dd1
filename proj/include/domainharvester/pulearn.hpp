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
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "domainharvester/classifiers.hpp"
#include "domainharvester/features.hpp"
#include "domainharvester/labeling.hpp"

namespace dh::pu {

struct TrainingSet {
  std::vector<std::string> positives;  // sorted
  std::vector<std::string> unlabeled;  // sorted
  features::FeatureMatrix matrix;      // positives first, then unlabeled
  std::vector<int> targets;

  std::size_t b() const { return positives.size(); }
  std::size_t c() const { return unlabeled.size(); }
  std::size_t d() const { return b() + c(); }
  ml::Dataset dataset() const { return {matrix.data, matrix.rows(), matrix.width(), targets}; }
};

// Positives are the labeled PLDs; the unlabeled sample is a seeded uniform
// draw of round(B * ratio) unknown PLDs. Throws InsufficientUnknowns,
// SnapshotMismatch.
TrainingSet build_training_set(const labeling::LabelReport& report, const features::FeatureMatrix& matrix,
                               std::uint64_t seed, double unlabeled_ratio = 1.0);

struct SearchSpace {
  int depth_min = 2, depth_max = 10;
  double lr_min = 0.02, lr_max = 0.3;
  int trees_min = 20, trees_max = 200;
  int leaves_min = 4, leaves_max = 63;
};

struct TuningBudget {
  int trials = 25;  // trial 0 is the kind's defaults
  std::uint64_t seed = 42;
  int folds = 5;
  // Trials within this of the best CV AUC compete on CV log-loss.
  double auc_tolerance = 0.01;
  SearchSpace space;
};

struct PuModel {
  ml::BaseKind kind = ml::BaseKind::GradientBoosting;
  ml::HyperParams params;
  std::shared_ptr<const ml::BaseClassifier> base;
  double c_hat = 1.0;
  std::string schema_fingerprint;
  std::vector<std::string> columns;
  std::uint64_t trained_on = 0;
  double cv_auc = 0.5;
};

inline constexpr std::size_t kMinTrainingRows = 20;

// Random search over the budget maximizing mean CV AUC, then Elkan-Noto
// calibration: the base is fit on a stratified 80% split and c_hat is its
// mean score over the held-out positives. Throws InsufficientTrainingData,
// DegenerateTraining.
PuModel train_pu(const ml::Dataset& data, const std::vector<std::string>& columns, ml::BaseKind kind,
                 const TuningBudget& budget, kernels::ExecMode mode = kernels::ExecMode::Parallel,
                 std::uint64_t trained_on = 0);
PuModel train_pu(const TrainingSet& ts, ml::BaseKind kind, const TuningBudget& budget,
                 kernels::ExecMode mode = kernels::ExecMode::Parallel);

// min(1, base / c_hat)
double adjust_score(double base_score, double c_hat);

std::vector<double> score_rows(const PuModel& model, std::span<const double> x, std::size_t cols);
// Throws SchemaMismatch.
std::map<std::string, double> score(const PuModel& model, const features::FeatureMatrix& matrix);

// Stratified fold assignment: fold index per row.
std::vector<int> stratified_folds(std::span<const int> y, int folds, std::uint64_t seed);

// Mean CV AUC of one hyperparameter setting.
double cv_auc(const ml::Dataset& data, ml::BaseKind kind, const ml::HyperParams& params, int folds,
              std::uint64_t seed, kernels::ExecMode mode);

struct CvRow {
  ml::BaseKind kind;
  double auc = 0;
  double recall = 0;
  double precision = 0;
  double f1 = 0;
};

// Per-fold metrics averaged; precision/recall/F1 at threshold 0.5.
std::vector<CvRow> evaluate_cv(const ml::Dataset& data, const std::vector<ml::BaseKind>& kinds, int folds,
                               std::uint64_t seed, kernels::ExecMode mode = kernels::ExecMode::Parallel);
std::string format_cv_table(const std::vector<CvRow>& rows);

// Split counts summed per feature group. Throws UnsupportedBase.
std::map<features::Group, double> report_importance(const PuModel& model, const features::FeatureMatrix& schema);
// Split counts keyed by column name. Throws UnsupportedBase.
features::ColumnImportance column_importance(const PuModel& model);

Json model_to_json(const PuModel& model);
PuModel model_from_json(const Json& j);

}  // namespace dh::pu
