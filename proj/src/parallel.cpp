// Copyright 2026 The blearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bl/parallel.hpp"

#include <algorithm>
#include <cassert>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bl {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

constexpr std::size_t kLeaf = 8;

double sum_range(std::span<const double> v) {
  if (v.size() <= kLeaf) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return sum_range(v.first(half)) + sum_range(v.subspan(half));
}

void row_sum_range(std::span<const double> rows, std::size_t width, std::size_t first,
                   std::size_t count, std::span<double> out) {
  if (count <= kLeaf) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t r = first; r < first + count; ++r) {
      const double* row = rows.data() + r * width;
      for (std::size_t j = 0; j < width; ++j) out[j] += row[j];
    }
    return;
  }
  const std::size_t half = count / 2;
  row_sum_range(rows, width, first, half, out);
  std::vector<double> right(width);
  row_sum_range(rows, width, first + half, count - half, right);
  for (std::size_t j = 0; j < width; ++j) out[j] += right[j];
}

}  // namespace

double pairwise_sum(std::span<const double> v) { return sum_range(v); }

void pairwise_row_sum(std::span<const double> rows, std::size_t width, std::span<double> out) {
  assert(out.size() == width);
  assert(width == 0 || rows.size() % width == 0);
  const std::size_t n = width == 0 ? 0 : rows.size() / width;
  row_sum_range(rows, width, 0, n, out);
}

}  // namespace bl
