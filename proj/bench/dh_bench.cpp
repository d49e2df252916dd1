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

// Serial vs OpenMP timings for the three kernels, with an equality check.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <vector>

#include "domainharvester/kernels.hpp"
#include "domainharvester/tree.hpp"

using namespace dh;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double best_ms(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  return best;
}

void line(const char* name, double serial, double parallel, bool same) {
  std::printf("%-14s serial %9.2f ms  omp %9.2f ms  speedup %5.2fx  %s\n", name, serial, parallel,
              parallel > 0 ? serial / parallel : 0.0, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t rows = 4000;
  int reps = 3;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (!std::strcmp(argv[i], "--rows")) rows = std::strtoul(argv[i + 1], nullptr, 10);
    if (!std::strcmp(argv[i], "--reps")) reps = std::atoi(argv[i + 1]);
  }
  std::printf("threads %d, rows %zu\n", kernels::max_threads(), rows);
  std::mt19937_64 rng(1);
  std::normal_distribution<float> normal;
  bool all_same = true;

  // Feature fill: two 768-dim embeddings plus sparse scalars per row.
  constexpr std::size_t dim = 768;
  const std::size_t width = 2 * dim + 300;
  std::vector<float> emb(rows * 2 * dim);
  for (auto& v : emb) v = normal(rng);
  std::vector<kernels::RowSpec> specs(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    specs[r].title = emb.data() + r * 2 * dim;
    specs[r].link = emb.data() + r * 2 * dim + dim;
    specs[r].embedding_dim = dim;
    for (std::uint32_t c = 0; c < 20; ++c) specs[r].sparse.emplace_back(2 * dim + (r * 7 + c * 13) % 300, 1.0 + c);
  }
  std::vector<double> a(rows * width), b(rows * width);
  const double fs = best_ms(reps, [&] { kernels::fill_rows_serial(specs, width, a.data()); });
  const double fp = best_ms(reps, [&] { kernels::fill_rows_omp(specs, width, b.data()); });
  line("feature-fill", fs, fp, a == b);
  all_same = all_same && a == b;

  // Split search on a 60-column slice.
  const std::size_t cols = 60;
  std::vector<double> x(rows * cols);
  for (auto& v : x) v = normal(rng);
  const auto binned = ml::bin_matrix(x, rows, cols);
  std::vector<std::uint32_t> samples(rows);
  std::iota(samples.begin(), samples.end(), 0u);
  std::vector<double> grad(rows), hess(rows, 0.25);
  for (std::size_t r = 0; r < rows; ++r) grad[r] = x[r * cols] + 0.5 * x[r * cols + 3] > 0 ? 0.5 : -0.5;
  std::vector<int> features(cols);
  std::iota(features.begin(), features.end(), 0);
  kernels::SplitParams sp{1.0, 5, 1e-3};
  kernels::SplitCandidate cs, cp;
  const double ss = best_ms(reps, [&] { cs = kernels::best_split_serial(binned, samples, grad, hess, features, sp); });
  const double spp = best_ms(reps, [&] { cp = kernels::best_split_omp(binned, samples, grad, hess, features, sp); });
  const bool split_same = cs.feature == cp.feature && cs.bin == cp.bin && cs.gain == cp.gain;
  line("split-search", ss, spp, split_same);
  all_same = all_same && split_same;

  // Batch scoring with 100 depth-6 trees.
  std::vector<ml::Tree> trees;
  std::mt19937_64 tree_rng(3);
  std::vector<std::uint32_t> counts(cols);
  ml::TreeParams tp;
  tp.lambda = 1;
  for (int t = 0; t < 100; ++t) {
    for (std::size_t r = 0; r < rows; ++r) grad[r] = std::sin(x[r * cols + t % cols] * (1 + t % 5));
    trees.push_back(ml::build_tree(binned, samples, grad, hess, tp, tree_rng, counts));
  }
  std::vector<double> ps(rows), pp(rows);
  const double ps_ms = best_ms(reps, [&] { kernels::predict_sum_serial(trees, x, cols, ps.data()); });
  const double pp_ms = best_ms(reps, [&] { kernels::predict_sum_omp(trees, x, cols, pp.data()); });
  line("batch-scoring", ps_ms, pp_ms, ps == pp);
  all_same = all_same && ps == pp;
  return all_same ? 0 : 1;
}
