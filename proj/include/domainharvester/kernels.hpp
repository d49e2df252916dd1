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

// Hot loops with a serial reference and an OpenMP version. The two must
// produce bit-identical results for any thread count.

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "domainharvester/tree.hpp"

namespace dh::kernels {

enum class ExecMode { Serial, Parallel };

// Dense row assembly for the feature matrix.
struct RowSpec {
  const float* title = nullptr;  // kEmbeddingDim floats
  const float* link = nullptr;
  std::size_t embedding_dim = 0;
  std::vector<std::pair<std::uint32_t, double>> sparse;  // column index >= 2 * embedding_dim
};

void fill_rows_serial(std::span<const RowSpec> rows, std::size_t width, double* out);
void fill_rows_omp(std::span<const RowSpec> rows, std::size_t width, double* out);
void fill_rows(std::span<const RowSpec> rows, std::size_t width, double* out, ExecMode mode);

struct SplitCandidate {
  double gain = -std::numeric_limits<double>::infinity();
  int feature = -1;
  int bin = -1;
  double left_grad = 0;
  double left_hess = 0;
  std::size_t left_count = 0;

  bool valid() const { return feature >= 0; }
  // Higher gain wins, then lower feature index, then lower bin.
  bool better_than(const SplitCandidate& o) const;
};

struct SplitParams {
  double lambda = 0;
  std::size_t min_samples_leaf = 1;
  double min_hessian_leaf = 0;
};

// Histogram split search over the given candidate features for one node.
SplitCandidate best_split_serial(const ml::BinnedMatrix& x, std::span<const std::uint32_t> samples,
                                 std::span<const double> grad, std::span<const double> hess,
                                 std::span<const int> features, const SplitParams& params);
SplitCandidate best_split_omp(const ml::BinnedMatrix& x, std::span<const std::uint32_t> samples,
                              std::span<const double> grad, std::span<const double> hess,
                              std::span<const int> features, const SplitParams& params);

// out[r] = sum over trees of tree.predict(row r).
void predict_sum_serial(std::span<const ml::Tree> trees, std::span<const double> data, std::size_t width,
                        double* out);
void predict_sum_omp(std::span<const ml::Tree> trees, std::span<const double> data, std::size_t width, double* out);
void predict_sum(std::span<const ml::Tree> trees, std::span<const double> data, std::size_t width, double* out,
                 ExecMode mode);

int max_threads();

}  // namespace dh::kernels
