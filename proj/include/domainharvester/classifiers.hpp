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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "domainharvester/kernels.hpp"
#include "domainharvester/serialize.hpp"
#include "domainharvester/tree.hpp"

namespace dh::ml {

enum class BaseKind { DecisionTree, RandomForest, GradientBoosting };

std::string_view to_string(BaseKind k);
BaseKind base_kind_from_string(std::string_view s);

struct HyperParams {
  int max_depth = 6;
  int max_leaves = 31;
  int n_trees = 100;
  double learning_rate = 0.1;
  std::size_t min_samples_leaf = 5;
  double lambda = 1.0;  // boosting only; trees and forests use 0

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

void to_json(Json& j, const HyperParams& v);
void from_json(const Json& j, HyperParams& v);

// Row-major training data with 0/1 targets.
struct Dataset {
  std::span<const double> x;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<const int> y;
};

class BaseClassifier {
 public:
  virtual ~BaseClassifier() = default;
  virtual std::string name() const = 0;
  virtual bool tree_based() const = 0;
  virtual void fit(const Dataset& data, std::uint64_t seed) = 0;
  // Scores in [0, 1], one per row.
  virtual std::vector<double> predict(std::span<const double> x, std::size_t cols) const = 0;
  // Split count per column. Throws UnsupportedBase for non-tree models.
  virtual std::vector<double> feature_importance() const = 0;
  virtual Json to_json() const = 0;
};

class TreeClassifier : public BaseClassifier {
 public:
  TreeClassifier(BaseKind kind, HyperParams params, kernels::ExecMode mode = kernels::ExecMode::Parallel);

  std::string name() const override { return std::string(to_string(kind_)); }
  bool tree_based() const override { return true; }
  void fit(const Dataset& data, std::uint64_t seed) override;
  std::vector<double> predict(std::span<const double> x, std::size_t cols) const override;
  std::vector<double> feature_importance() const override;
  Json to_json() const override;

  static std::unique_ptr<TreeClassifier> from_json(const Json& j);

  BaseKind kind() const { return kind_; }
  const HyperParams& params() const { return params_; }
  const std::vector<Tree>& trees() const { return trees_; }

 private:
  void fit_tree(const Dataset& data, const BinnedMatrix& binned, std::uint64_t seed);
  void fit_forest(const Dataset& data, const BinnedMatrix& binned, std::uint64_t seed);
  void fit_boosting(const Dataset& data, const BinnedMatrix& binned);

  BaseKind kind_;
  HyperParams params_;
  kernels::ExecMode mode_;
  std::size_t cols_ = 0;
  double base_score_ = 0;  // boosting: initial log-odds
  std::vector<Tree> trees_;
  std::vector<std::uint32_t> split_counts_;
};

std::unique_ptr<BaseClassifier> make_classifier(BaseKind kind, const HyperParams& params,
                                                kernels::ExecMode mode = kernels::ExecMode::Parallel);

// Defaults per kind (forest and tree differ from boosting in depth/lambda).
HyperParams default_params(BaseKind kind);

}  // namespace dh::ml
