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

#include <span>

namespace dh::ml {

// Area under the ROC curve via the Mann-Whitney rank statistic; tied scores
// share their average rank. Labels are 0/1. Returns 0.5 when one class is
// missing.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct BinaryMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Positive prediction means score >= threshold.
BinaryMetrics binary_metrics(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

}  // namespace dh::ml
