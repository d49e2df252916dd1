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
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace dh::ml {

inline constexpr int kMaxBins = 255;

// A column quantized to at most kMaxBins bins. Value v falls in the first
// bin b with v <= thresholds[b]; the last bin is open-ended.
struct BinnedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bins;                // column-major
  std::vector<std::vector<double>> thresholds;   // per column, size = bin count - 1

  std::uint8_t bin(std::size_t row, std::size_t col) const { return bins[col * rows + row]; }
  int bin_count(std::size_t col) const { return static_cast<int>(thresholds[col].size()) + 1; }
};

// Row-major dense input.
BinnedMatrix bin_matrix(std::span<const double> data, std::size_t rows, std::size_t cols, int max_bins = kMaxBins);

struct Node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const Node&, const Node&) = default;
};

struct Tree {
  std::vector<Node> nodes;  // nodes[0] is the root

  double predict(std::span<const double> row) const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct TreeParams {
  int max_depth = 6;
  int max_leaves = 31;
  std::size_t min_samples_leaf = 5;
  double min_hessian_leaf = 1e-3;
  double lambda = 0.0;
  double min_gain = 1e-12;
  // Features tried per split; 0 means all.
  std::size_t features_per_split = 0;
  bool parallel_split_search = true;
};

// Best-first growth on gain = GL^2/(HL+lambda) + GR^2/(HR+lambda) - G^2/(H+lambda).
// Leaves predict G/(H+lambda): with grad = y and hess = 1 that is the mean
// target, with negative gradients and hessians it is a Newton step.
// split_counts[f] is incremented once per split on feature f.
Tree build_tree(const BinnedMatrix& x, std::span<const std::uint32_t> samples, std::span<const double> grad,
                std::span<const double> hess, const TreeParams& params, std::mt19937_64& rng,
                std::vector<std::uint32_t>& split_counts);

}  // namespace dh::ml
