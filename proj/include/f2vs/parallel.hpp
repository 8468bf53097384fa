// Copyright (c) 2026 The f2vs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef F2VS_PARALLEL_HPP
#define F2VS_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <vector>

namespace f2vs::par {

// Thread budget. F2VS_THREADS=0 forces serial execution; unset uses the
// OpenMP default. Read once and cached.
int max_threads();

// Deterministic sum reduction: [0, n) is cut into fixed-size blocks,
// `body(lo, hi)` returns each block's partial (summed serially inside the
// block), and partials are accumulated in block order. The result is
// bit-identical for any thread count.
template <class F>
double blocked_sum(std::size_t n, F&& body, std::size_t block = 1024) {
  if (n == 0) return 0.0;
  const std::size_t nblocks = (n + block - 1) / block;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * block;
    const std::size_t hi = std::min(n, lo + block);
    partial[static_cast<std::size_t>(b)] = body(lo, hi);
  }
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc;
}

// Per-index reduction with the same block-order guarantee: term(i) values
// are summed serially inside each block, partials in block order.
template <class F>
double blocked_sum_terms(std::size_t n, F&& term, std::size_t block = 1024) {
  return blocked_sum(
      n,
      [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += term(i);
        return acc;
      },
      block);
}

// Parallel map over independent indices; each index writes only its own
// outputs, so results never depend on scheduling.
template <class F>
void parallel_for(std::size_t n, F&& body) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    body(static_cast<std::size_t>(i));
  }
}

}  // namespace f2vs::par

#endif  // F2VS_PARALLEL_HPP
