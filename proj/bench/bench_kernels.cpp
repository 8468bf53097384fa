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

// Parallel kernels vs their naive serial references. Run with
// F2VS_THREADS=<n> to pin the thread budget of the parallel side.

#include <benchmark/benchmark.h>

#include <vector>

#include "f2vs/kde.hpp"
#include "f2vs/mmd.hpp"
#include "f2vs/pca.hpp"
#include "f2vs/random.hpp"
#include "f2vs/reference.hpp"

using namespace f2vs;

namespace {

Mat gaussian_mat(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  RandomSource rng(seed);
  Mat m(rows, cols);
  for (double& x : m.a) x = rng.gaussian();
  return m;
}

void BM_Mmd2BiasedParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Mat x = gaussian_mat(n, 64, 1);
  const Mat y = gaussian_mat(n, 64, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mmd2_biased(x, y, 3.0));
  }
}
BENCHMARK(BM_Mmd2BiasedParallel)->Arg(256)->Arg(1024);

void BM_Mmd2BiasedSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Mat x = gaussian_mat(n, 64, 1);
  const Mat y = gaussian_mat(n, 64, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ref::mmd2_biased(x, y, 3.0));
  }
}
BENCHMARK(BM_Mmd2BiasedSerial)->Arg(256)->Arg(1024);

void BM_MedianBandwidthParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Mat x = gaussian_mat(n, 64, 3);
  const Mat y = gaussian_mat(n, 64, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(median_heuristic_bandwidth(x, y));
  }
}
BENCHMARK(BM_MedianBandwidthParallel)->Arg(256)->Arg(1024);

void BM_MedianBandwidthSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Mat x = gaussian_mat(n, 64, 3);
  const Mat y = gaussian_mat(n, 64, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ref::median_heuristic_bandwidth(x, y));
  }
}
BENCHMARK(BM_MedianBandwidthSerial)->Arg(256)->Arg(1024);

void BM_KdeBatchParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Mat samples = gaussian_mat(n, 2, 5);
  const Mat eval = gaussian_mat(1000, 2, 6);
  const KdeModel model = kde_fit(samples, BandwidthRule::scott);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kde_log_density_batch(model, eval));
  }
}
BENCHMARK(BM_KdeBatchParallel)->Arg(1000)->Arg(4000);

void BM_KdeBatchSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Mat samples = gaussian_mat(n, 2, 5);
  const Mat eval = gaussian_mat(1000, 2, 6);
  const KdeModel model = kde_fit(samples, BandwidthRule::scott);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ref::kde_log_density_batch(model, eval));
  }
}
BENCHMARK(BM_KdeBatchSerial)->Arg(1000)->Arg(4000);

void BM_CovarianceParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Mat data = gaussian_mat(n, 64, 7);
  std::vector<double> mean(64, 0.0);
  for (std::size_t i = 0; i < data.rows; ++i) {
    for (std::size_t j = 0; j < 64; ++j) mean[j] += data(i, j);
  }
  for (double& m : mean) m /= static_cast<double>(data.rows);
  for (auto _ : state) {
    benchmark::DoNotOptimize(covariance(data, mean));
  }
}
BENCHMARK(BM_CovarianceParallel)->Arg(2000);

void BM_CovarianceSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Mat data = gaussian_mat(n, 64, 7);
  std::vector<double> mean(64, 0.0);
  for (std::size_t i = 0; i < data.rows; ++i) {
    for (std::size_t j = 0; j < 64; ++j) mean[j] += data(i, j);
  }
  for (double& m : mean) m /= static_cast<double>(data.rows);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ref::covariance(data, mean));
  }
}
BENCHMARK(BM_CovarianceSerial)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
