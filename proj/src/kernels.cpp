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

#include "domainharvester/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstring>

namespace dh::kernels {
namespace {

void fill_one(const RowSpec& spec, std::size_t width, double* row) {
  std::fill(row, row + width, 0.0);
  const std::size_t d = spec.embedding_dim;
  if (spec.title) {
    for (std::size_t i = 0; i < d; ++i) row[i] = static_cast<double>(spec.title[i]);
  }
  if (spec.link) {
    for (std::size_t i = 0; i < d; ++i) row[d + i] = static_cast<double>(spec.link[i]);
  }
  for (const auto& [col, v] : spec.sparse) row[col] = v;
}

struct BinStats {
  double grad = 0;
  double hess = 0;
  std::size_t count = 0;
};

SplitCandidate scan_feature(const ml::BinnedMatrix& x, std::span<const std::uint32_t> samples,
                            std::span<const double> grad, std::span<const double> hess, int feature,
                            const SplitParams& p, std::vector<BinStats>& hist) {
  const int nbins = x.bin_count(static_cast<std::size_t>(feature));
  SplitCandidate best;
  if (nbins < 2) return best;
  hist.assign(static_cast<std::size_t>(nbins), BinStats{});
  const std::uint8_t* col = x.bins.data() + static_cast<std::size_t>(feature) * x.rows;
  double total_g = 0, total_h = 0;
  for (auto s : samples) {
    auto& b = hist[col[s]];
    b.grad += grad[s];
    b.hess += hess[s];
    ++b.count;
  }
  for (const auto& b : hist) {
    total_g += b.grad;
    total_h += b.hess;
  }
  const double parent = total_g * total_g / (total_h + p.lambda);
  double lg = 0, lh = 0;
  std::size_t lc = 0;
  for (int b = 0; b + 1 < nbins; ++b) {
    lg += hist[static_cast<std::size_t>(b)].grad;
    lh += hist[static_cast<std::size_t>(b)].hess;
    lc += hist[static_cast<std::size_t>(b)].count;
    const std::size_t rc = samples.size() - lc;
    if (lc < p.min_samples_leaf || rc < p.min_samples_leaf) continue;
    const double rg = total_g - lg;
    const double rh = total_h - lh;
    if (lh < p.min_hessian_leaf || rh < p.min_hessian_leaf) continue;
    if (lh + p.lambda <= 0 || rh + p.lambda <= 0) continue;
    const double gain = lg * lg / (lh + p.lambda) + rg * rg / (rh + p.lambda) - parent;
    SplitCandidate c{gain, feature, b, lg, lh, lc};
    if (c.better_than(best)) best = c;
  }
  return best;
}

}  // namespace

bool SplitCandidate::better_than(const SplitCandidate& o) const {
  if (!valid()) return false;
  if (!o.valid()) return true;
  if (gain != o.gain) return gain > o.gain;
  if (feature != o.feature) return feature < o.feature;
  return bin < o.bin;
}

void fill_rows_serial(std::span<const RowSpec> rows, std::size_t width, double* out) {
  for (std::size_t r = 0; r < rows.size(); ++r) fill_one(rows[r], width, out + r * width);
}

void fill_rows_omp(std::span<const RowSpec> rows, std::size_t width, double* out) {
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    fill_one(rows[static_cast<std::size_t>(r)], width, out + static_cast<std::size_t>(r) * width);
  }
}

void fill_rows(std::span<const RowSpec> rows, std::size_t width, double* out, ExecMode mode) {
  if (mode == ExecMode::Parallel) fill_rows_omp(rows, width, out);
  else fill_rows_serial(rows, width, out);
}

SplitCandidate best_split_serial(const ml::BinnedMatrix& x, std::span<const std::uint32_t> samples,
                                 std::span<const double> grad, std::span<const double> hess,
                                 std::span<const int> features, const SplitParams& params) {
  SplitCandidate best;
  std::vector<BinStats> hist;
  for (int f : features) {
    const auto c = scan_feature(x, samples, grad, hess, f, params, hist);
    if (c.better_than(best)) best = c;
  }
  return best;
}

SplitCandidate best_split_omp(const ml::BinnedMatrix& x, std::span<const std::uint32_t> samples,
                              std::span<const double> grad, std::span<const double> hess,
                              std::span<const int> features, const SplitParams& params) {
  // Per-feature results reduced serially keep the answer thread-count independent.
  std::vector<SplitCandidate> per_feature(features.size());
  const auto n = static_cast<std::ptrdiff_t>(features.size());
#pragma omp parallel
  {
    std::vector<BinStats> hist;
#pragma omp for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      per_feature[static_cast<std::size_t>(i)] =
          scan_feature(x, samples, grad, hess, features[static_cast<std::size_t>(i)], params, hist);
    }
  }
  SplitCandidate best;
  for (const auto& c : per_feature) {
    if (c.better_than(best)) best = c;
  }
  return best;
}

void predict_sum_serial(std::span<const ml::Tree> trees, std::span<const double> data, std::size_t width,
                        double* out) {
  const std::size_t rows = width ? data.size() / width : 0;
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0;
    for (const auto& t : trees) s += t.predict(data.subspan(r * width, width));
    out[r] = s;
  }
}

void predict_sum_omp(std::span<const ml::Tree> trees, std::span<const double> data, std::size_t width, double* out) {
  const auto rows = static_cast<std::ptrdiff_t>(width ? data.size() / width : 0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    double s = 0;
    for (const auto& t : trees) s += t.predict(data.subspan(static_cast<std::size_t>(r) * width, width));
    out[r] = s;
  }
}

void predict_sum(std::span<const ml::Tree> trees, std::span<const double> data, std::size_t width, double* out,
                 ExecMode mode) {
  if (mode == ExecMode::Parallel) predict_sum_omp(trees, data, width, out);
  else predict_sum_serial(trees, data, width, out);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace dh::kernels
