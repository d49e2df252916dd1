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

#include "domainharvester/tree.hpp"

#include <algorithm>
#include <numeric>

#include "domainharvester/error.hpp"
#include "domainharvester/kernels.hpp"

namespace dh::ml {

BinnedMatrix bin_matrix(std::span<const double> data, std::size_t rows, std::size_t cols, int max_bins) {
  if (data.size() != rows * cols) throw Error(Errc::InvalidArgument, "bin_matrix: shape mismatch");
  if (max_bins < 2 || max_bins > kMaxBins) throw Error(Errc::InvalidArgument, "bin_matrix: bad bin count");
  BinnedMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.bins.resize(rows * cols);
  m.thresholds.resize(cols);
  std::vector<double> values(rows);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) values[r] = data[r * cols + c];
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> uniq = sorted;
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    auto& th = m.thresholds[c];
    if (uniq.size() <= static_cast<std::size_t>(max_bins)) {
      for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
        double mid = uniq[i] + (uniq[i + 1] - uniq[i]) / 2;
        if (!(mid < uniq[i + 1])) mid = uniq[i];
        th.push_back(mid);
      }
    } else {
      for (int k = 1; k < max_bins; ++k) {
        const auto idx = static_cast<std::size_t>(k) * sorted.size() / static_cast<std::size_t>(max_bins);
        const double v = sorted[std::min(idx, sorted.size() - 1)];
        if (th.empty() || v > th.back()) th.push_back(v);
      }
      if (!th.empty() && th.back() >= uniq.back()) th.pop_back();
    }
    for (std::size_t r = 0; r < rows; ++r) {
      m.bins[c * rows + r] =
          static_cast<std::uint8_t>(std::lower_bound(th.begin(), th.end(), values[r]) - th.begin());
    }
  }
  return m;
}

double Tree::predict(std::span<const double> row) const {
  int i = 0;
  while (true) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.is_leaf()) return n.value;
    i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
}

namespace {

struct Pending {
  int node = 0;
  int depth = 0;
  std::vector<std::uint32_t> samples;
  double grad = 0;
  double hess = 0;
  kernels::SplitCandidate split;
};

}  // namespace

Tree build_tree(const BinnedMatrix& x, std::span<const std::uint32_t> samples, std::span<const double> grad,
                std::span<const double> hess, const TreeParams& params, std::mt19937_64& rng,
                std::vector<std::uint32_t>& split_counts) {
  if (split_counts.size() < x.cols) split_counts.resize(x.cols, 0);
  const kernels::SplitParams sp{params.lambda, std::max<std::size_t>(1, params.min_samples_leaf),
                                params.min_hessian_leaf};
  std::vector<int> all_features(x.cols);
  std::iota(all_features.begin(), all_features.end(), 0);
  std::vector<int> feature_pool = all_features;

  auto leaf_value = [&](double g, double h) { return h + params.lambda > 0 ? g / (h + params.lambda) : 0.0; };

  auto evaluate = [&](Pending& p) {
    p.split = {};
    if (p.depth >= params.max_depth || p.samples.size() < 2 * sp.min_samples_leaf) return;
    std::span<const int> features = all_features;
    if (params.features_per_split > 0 && params.features_per_split < x.cols) {
      // Partial Fisher-Yates over a persistent pool; deterministic given rng.
      for (std::size_t i = 0; i < params.features_per_split; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, feature_pool.size() - 1);
        std::swap(feature_pool[i], feature_pool[pick(rng)]);
      }
      std::sort(feature_pool.begin(), feature_pool.begin() + static_cast<std::ptrdiff_t>(params.features_per_split));
      features = std::span<const int>(feature_pool.data(), params.features_per_split);
    }
    p.split = params.parallel_split_search ? kernels::best_split_omp(x, p.samples, grad, hess, features, sp)
                                           : kernels::best_split_serial(x, p.samples, grad, hess, features, sp);
    if (p.split.valid() && p.split.gain <= params.min_gain) p.split = {};
  };

  Tree tree;
  Pending root;
  root.samples.assign(samples.begin(), samples.end());
  for (auto s : root.samples) {
    root.grad += grad[s];
    root.hess += hess[s];
  }
  tree.nodes.push_back(Node{-1, 0, -1, -1, leaf_value(root.grad, root.hess)});
  evaluate(root);

  std::vector<Pending> open;
  open.push_back(std::move(root));
  int leaves = 1;
  while (leaves < params.max_leaves) {
    std::size_t best = open.size();
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (!open[i].split.valid()) continue;
      if (best == open.size() || open[i].split.gain > open[best].split.gain) best = i;
    }
    if (best == open.size()) break;
    Pending p = std::move(open[best]);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(best));

    const auto f = static_cast<std::size_t>(p.split.feature);
    Pending left, right;
    left.depth = right.depth = p.depth + 1;
    for (auto s : p.samples) {
      (x.bin(s, f) <= p.split.bin ? left.samples : right.samples).push_back(s);
    }
    left.grad = p.split.left_grad;
    left.hess = p.split.left_hess;
    right.grad = p.grad - left.grad;
    right.hess = p.hess - left.hess;

    left.node = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(Node{-1, 0, -1, -1, leaf_value(left.grad, left.hess)});
    right.node = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(Node{-1, 0, -1, -1, leaf_value(right.grad, right.hess)});
    auto& parent = tree.nodes[static_cast<std::size_t>(p.node)];
    parent.feature = p.split.feature;
    parent.threshold = x.thresholds[f][static_cast<std::size_t>(p.split.bin)];
    parent.left = left.node;
    parent.right = right.node;
    ++split_counts[f];
    ++leaves;

    evaluate(left);
    evaluate(right);
    open.push_back(std::move(left));
    open.push_back(std::move(right));
  }
  return tree;
}

}  // namespace dh::ml
