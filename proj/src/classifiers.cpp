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

#include "domainharvester/classifiers.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "domainharvester/error.hpp"

namespace dh::ml {
namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::uint64_t tree_seed(std::uint64_t seed, std::size_t t) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return static_cast<std::uint64_t>(words[0]) << 32 | words[1];
}

Json tree_to_json(const Tree& t) {
  Json nodes = Json::array();
  for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
  return nodes;
}

Tree tree_from_json(const Json& j) {
  Tree t;
  for (const auto& n : j) {
    t.nodes.push_back(Node{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                           n.at(4).get<double>()});
  }
  return t;
}

}  // namespace

std::string_view to_string(BaseKind k) {
  switch (k) {
    case BaseKind::DecisionTree: return "decision-tree";
    case BaseKind::RandomForest: return "random-forest";
    case BaseKind::GradientBoosting: return "gradient-boosting";
  }
  return "gradient-boosting";
}

BaseKind base_kind_from_string(std::string_view s) {
  for (auto k : {BaseKind::DecisionTree, BaseKind::RandomForest, BaseKind::GradientBoosting}) {
    if (to_string(k) == s) return k;
  }
  throw Error(Errc::ConfigError, "unknown base classifier '" + std::string(s) +
                                     "' (decision-tree | random-forest | gradient-boosting)");
}

void to_json(Json& j, const HyperParams& v) {
  j = Json{{"max_depth", v.max_depth},         {"max_leaves", v.max_leaves}, {"n_trees", v.n_trees},
           {"learning_rate", v.learning_rate}, {"min_samples_leaf", v.min_samples_leaf}, {"lambda", v.lambda}};
}

void from_json(const Json& j, HyperParams& v) {
  v.max_depth = get_field<int>(j, "max_depth");
  v.max_leaves = get_field<int>(j, "max_leaves");
  v.n_trees = get_field<int>(j, "n_trees");
  v.learning_rate = get_field<double>(j, "learning_rate");
  v.min_samples_leaf = get_field<std::size_t>(j, "min_samples_leaf");
  v.lambda = get_field<double>(j, "lambda");
}

HyperParams default_params(BaseKind kind) {
  HyperParams p;
  switch (kind) {
    case BaseKind::DecisionTree:
      p.max_depth = 8;
      p.max_leaves = 64;
      p.n_trees = 1;
      p.lambda = 0;
      break;
    case BaseKind::RandomForest:
      p.max_depth = 10;
      p.max_leaves = 128;
      p.n_trees = 100;
      p.min_samples_leaf = 2;
      p.lambda = 0;
      break;
    case BaseKind::GradientBoosting:
      break;
  }
  return p;
}

TreeClassifier::TreeClassifier(BaseKind kind, HyperParams params, kernels::ExecMode mode)
    : kind_(kind), params_(params), mode_(mode) {
  if (params_.max_depth < 1 || params_.max_leaves < 2 || params_.n_trees < 1 || params_.learning_rate <= 0 ||
      params_.lambda < 0) {
    throw Error(Errc::ConfigError, "invalid hyperparameters for " + name());
  }
}

void TreeClassifier::fit(const Dataset& data, std::uint64_t seed) {
  if (data.rows == 0 || data.x.size() != data.rows * data.cols || data.y.size() != data.rows) {
    throw Error(Errc::InvalidArgument, "fit: bad dataset shape");
  }
  cols_ = data.cols;
  trees_.clear();
  split_counts_.assign(cols_, 0);
  base_score_ = 0;
  const auto binned = bin_matrix(data.x, data.rows, data.cols);
  switch (kind_) {
    case BaseKind::DecisionTree: fit_tree(data, binned, seed); break;
    case BaseKind::RandomForest: fit_forest(data, binned, seed); break;
    case BaseKind::GradientBoosting: fit_boosting(data, binned); break;
  }
}

void TreeClassifier::fit_tree(const Dataset& data, const BinnedMatrix& binned, std::uint64_t seed) {
  std::vector<double> grad(data.rows), hess(data.rows, 1.0);
  for (std::size_t i = 0; i < data.rows; ++i) grad[i] = data.y[i];
  std::vector<std::uint32_t> samples(data.rows);
  std::iota(samples.begin(), samples.end(), 0);
  TreeParams tp{params_.max_depth, params_.max_leaves, params_.min_samples_leaf, 0.0, 0.0, 1e-12, 0,
                mode_ == kernels::ExecMode::Parallel};
  std::mt19937_64 rng(seed);
  trees_.push_back(build_tree(binned, samples, grad, hess, tp, rng, split_counts_));
}

void TreeClassifier::fit_forest(const Dataset& data, const BinnedMatrix& binned, std::uint64_t seed) {
  std::vector<double> grad(data.rows), hess(data.rows, 1.0);
  for (std::size_t i = 0; i < data.rows; ++i) grad[i] = data.y[i];
  const auto n_trees = static_cast<std::size_t>(params_.n_trees);
  const std::size_t per_split =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(data.cols)))));
  TreeParams tp{params_.max_depth, params_.max_leaves, params_.min_samples_leaf, 0.0, 0.0, 1e-12, per_split,
                false};
  std::vector<Tree> trees(n_trees);
  std::vector<std::vector<std::uint32_t>> counts(n_trees);
  auto grow = [&](std::size_t t) {
    std::mt19937_64 rng(tree_seed(seed, t));
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(data.rows - 1));
    std::vector<std::uint32_t> sample(data.rows);
    for (auto& s : sample) s = pick(rng);
    std::sort(sample.begin(), sample.end());
    counts[t].assign(data.cols, 0);
    trees[t] = build_tree(binned, sample, grad, hess, tp, rng, counts[t]);
  };
  if (mode_ == kernels::ExecMode::Parallel) {
    const auto n = static_cast<std::ptrdiff_t>(n_trees);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < n; ++t) grow(static_cast<std::size_t>(t));
  } else {
    for (std::size_t t = 0; t < n_trees; ++t) grow(t);
  }
  trees_ = std::move(trees);
  for (const auto& c : counts) {
    for (std::size_t f = 0; f < data.cols; ++f) split_counts_[f] += c[f];
  }
}

void TreeClassifier::fit_boosting(const Dataset& data, const BinnedMatrix& binned) {
  const std::size_t n = data.rows;
  const double pos = static_cast<double>(std::count(data.y.begin(), data.y.end(), 1));
  const double prior = std::clamp(pos / static_cast<double>(n), 1e-6, 1 - 1e-6);
  base_score_ = std::log(prior / (1 - prior));
  std::vector<double> raw(n, base_score_), grad(n), hess(n);
  std::vector<std::uint32_t> samples(n);
  std::iota(samples.begin(), samples.end(), 0);
  TreeParams tp{params_.max_depth, params_.max_leaves, params_.min_samples_leaf, 1e-3, params_.lambda, 1e-12, 0,
                mode_ == kernels::ExecMode::Parallel};
  std::mt19937_64 rng(0);
  for (int round = 0; round < params_.n_trees; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(raw[i]);
      grad[i] = data.y[i] - p;  // negative gradient of log loss
      hess[i] = std::max(p * (1 - p), 1e-16);
    }
    auto tree = build_tree(binned, samples, grad, hess, tp, rng, split_counts_);
    for (auto& node : tree.nodes) node.value *= params_.learning_rate;
    for (std::size_t i = 0; i < n; ++i) raw[i] += tree.predict(data.x.subspan(i * data.cols, data.cols));
    trees_.push_back(std::move(tree));
  }
}

std::vector<double> TreeClassifier::predict(std::span<const double> x, std::size_t cols) const {
  if (trees_.empty()) throw Error(Errc::InvalidArgument, name() + " used before fit");
  if (cols != cols_) throw Error(Errc::SchemaMismatch, "predict: expected " + std::to_string(cols_) + " columns");
  const std::size_t rows = cols ? x.size() / cols : 0;
  std::vector<double> out(rows);
  kernels::predict_sum(trees_, x, cols, out.data(), mode_);
  for (auto& v : out) {
    switch (kind_) {
      case BaseKind::DecisionTree: break;
      case BaseKind::RandomForest: v /= static_cast<double>(trees_.size()); break;
      case BaseKind::GradientBoosting: v = sigmoid(base_score_ + v); break;
    }
    v = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

std::vector<double> TreeClassifier::feature_importance() const {
  return std::vector<double>(split_counts_.begin(), split_counts_.end());
}

Json TreeClassifier::to_json() const {
  Json trees = Json::array();
  for (const auto& t : trees_) trees.push_back(tree_to_json(t));
  return Json{{"kind", std::string(to_string(kind_))}, {"params", params_},           {"cols", cols_},
              {"base_score", base_score_},             {"split_counts", split_counts_}, {"trees", trees}};
}

std::unique_ptr<TreeClassifier> TreeClassifier::from_json(const Json& j) {
  try {
    auto c = std::make_unique<TreeClassifier>(base_kind_from_string(j.at("kind").get<std::string>()),
                                              j.at("params").get<HyperParams>());
    c->cols_ = j.at("cols").get<std::size_t>();
    c->base_score_ = j.at("base_score").get<double>();
    c->split_counts_ = j.at("split_counts").get<std::vector<std::uint32_t>>();
    for (const auto& t : j.at("trees")) c->trees_.push_back(tree_from_json(t));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptArtifact, std::string("model: ") + e.what());
  }
}

std::unique_ptr<BaseClassifier> make_classifier(BaseKind kind, const HyperParams& params, kernels::ExecMode mode) {
  return std::make_unique<TreeClassifier>(kind, params, mode);
}

}  // namespace dh::ml
