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

#ifndef BL_PARALLEL_HPP_
#define BL_PARALLEL_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace bl {

// Selects between the OpenMP kernels and the serial reference loops. Both
// produce bitwise-identical results: per-item work is independent and every
// reduction goes through the fixed pairwise tree below.
enum class Exec { kSerial, kParallel };

// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads();

// Pairwise (cascade) summation in a fixed tree shape.
double pairwise_sum(std::span<const double> v);

// Sums `rows` rows of length `width` stored contiguously, pairwise over rows,
// writing into `out` (length `width`).
void pairwise_row_sum(std::span<const double> rows, std::size_t width, std::span<double> out);

}  // namespace bl

#endif  // BL_PARALLEL_HPP_
