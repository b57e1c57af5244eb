/* Copyright 2026 The sparseplan Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "sparseplan/trajectory.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sparseplan {

std::vector<size_t> TopKModes(const TrajectorySet& set, size_t k) {
  std::vector<size_t> order(set.scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return set.scores[a] > set.scores[b];
  });
  if (order.size() > k) order.resize(k);
  return order;
}

size_t ArgMax(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("argmax of empty range");
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace sparseplan
