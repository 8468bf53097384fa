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

#include "f2vs/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "f2vs/parallel.hpp"

namespace f2vs {
namespace {

constexpr double kBandwidthFloor = 1e-6;

double sqdist(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    acc += diff * diff;
  }
  return acc;
}

void check_pair(const Mat& x, const Mat& y) {
  require(x.cols == y.cols, "mmd: dimension mismatch between sets");
  require(x.rows >= 1 && y.rows >= 1, "mmd: both sets must be non-empty");
  require(x.cols >= 1, "mmd: dimension must be positive");
}

// Sum of k(x_i, y_j) over all pairs, fixed summation order.
double kernel_cross_sum(const Mat& x, const Mat& y, double inv_two_sigma2) {
  return par::blocked_sum_terms(x.rows, [&](std::size_t i) {
    const auto xi = x.row_span(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < y.rows; ++j) {
      acc += std::exp(-sqdist(xi, y.row_span(j)) * inv_two_sigma2);
    }
    return acc;
  });
}

double kernel_self_sum_offdiag(const Mat& x, double inv_two_sigma2) {
  return par::blocked_sum_terms(x.rows, [&](std::size_t i) {
    const auto xi = x.row_span(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < x.rows; ++j) {
      if (j == i) continue;
      acc += std::exp(-sqdist(xi, x.row_span(j)) * inv_two_sigma2);
    }
    return acc;
  });
}

}  // namespace

double rbf_kernel(std::span<const double> a, std::span<const double> b,
                  double sigma) {
  require(a.size() == b.size(), "rbf_kernel: dimension mismatch");
  require(sigma > 0.0, "rbf_kernel: sigma must be positive");
  return std::exp(-sqdist(a, b) / (2.0 * sigma * sigma));
}

double median_heuristic_bandwidth(const Mat& x, const Mat& y) {
  check_pair(x, y);
  const std::size_t n = x.rows + y.rows;
  const std::size_t d = x.cols;
  Mat pooled(n, d);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto src = x.row_span(i);
    std::copy(src.begin(), src.end(), pooled.row(i));
  }
  for (std::size_t i = 0; i < y.rows; ++i) {
    const auto src = y.row_span(i);
    std::copy(src.begin(), src.end(), pooled.row(x.rows + i));
  }

  const std::size_t num_pairs = n * (n - 1) / 2;
  require(num_pairs >= 1, "median_heuristic_bandwidth: need at least 2 rows");
  std::vector<double> dist(num_pairs);
  // Row i owns pairs (i, j > i); offset of its first pair in the flat list.
  std::vector<std::size_t> offset(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    offset[i] = offset[i - 1] + (n - i);
  }
  par::parallel_for(n - 1, [&](std::size_t i) {
    const auto xi = pooled.row_span(i);
    std::size_t at = offset[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[at++] = std::sqrt(sqdist(xi, pooled.row_span(j)));
    }
  });

  const std::size_t mid = num_pairs / 2;
  std::nth_element(dist.begin(), dist.begin() + mid, dist.end());
  double med = dist[mid];
  if (num_pairs % 2 == 0) {
    const double hi = med;
    std::nth_element(dist.begin(), dist.begin() + (mid - 1),
                     dist.begin() + mid);
    med = 0.5 * (dist[mid - 1] + hi);
  }
  return std::max(med, kBandwidthFloor);
}

double mmd2_biased(const Mat& x, const Mat& y, double sigma) {
  check_pair(x, y);
  require(sigma > 0.0, "mmd: sigma must be positive");
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const double n = static_cast<double>(x.rows);
  const double m = static_cast<double>(y.rows);
  const double sxx = kernel_cross_sum(x, x, inv);
  const double syy = kernel_cross_sum(y, y, inv);
  const double sxy = kernel_cross_sum(x, y, inv);
  // Grouped so identical inputs cancel exactly: the three sums share the
  // same summation order, and a + a - 2a is exact in binary floating point.
  return sxx / (n * n) + syy / (m * m) - 2.0 * (sxy / (n * m));
}

double mmd2_unbiased(const Mat& x, const Mat& y, double sigma) {
  check_pair(x, y);
  require(x.rows >= 2 && y.rows >= 2,
          "mmd2_unbiased: need at least 2 rows per set");
  require(sigma > 0.0, "mmd: sigma must be positive");
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const double n = static_cast<double>(x.rows);
  const double m = static_cast<double>(y.rows);
  const double sxx = kernel_self_sum_offdiag(x, inv);
  const double syy = kernel_self_sum_offdiag(y, inv);
  const double sxy = kernel_cross_sum(x, y, inv);
  return sxx / (n * (n - 1.0)) + syy / (m * (m - 1.0)) -
         2.0 * (sxy / (n * m));
}

double mmd2_biased_with_grad(const Mat& x, const Mat& y, double sigma,
                             Mat* grad_x) {
  check_pair(x, y);
  require(sigma > 0.0, "mmd: sigma must be positive");
  require(grad_x != nullptr, "mmd2_biased_with_grad: grad_x is null");
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const double inv_s2 = 1.0 / (sigma * sigma);
  const double n = static_cast<double>(x.rows);
  const double m = static_cast<double>(y.rows);
  const std::size_t d = x.cols;

  *grad_x = Mat(x.rows, d);
  const double sxx = kernel_cross_sum(x, x, inv);
  const double syy = kernel_cross_sum(y, y, inv);
  const double sxy = kernel_cross_sum(x, y, inv);

  // d k(a,b)/d a = k(a,b) (b - a) / sigma^2. Each row's gradient only
  // touches its own output row, so rows parallelize independently.
  par::parallel_for(x.rows, [&](std::size_t i) {
    const auto xi = x.row_span(i);
    double* g = grad_x->row(i);
    for (std::size_t j = 0; j < x.rows; ++j) {
      const auto xj = x.row_span(j);
      const double kv = std::exp(-sqdist(xi, xj) * inv);
      const double scale = 2.0 / (n * n) * kv * inv_s2;
      for (std::size_t t = 0; t < d; ++t) g[t] += scale * (xj[t] - xi[t]);
    }
    for (std::size_t j = 0; j < y.rows; ++j) {
      const auto yj = y.row_span(j);
      const double kv = std::exp(-sqdist(xi, yj) * inv);
      const double scale = -2.0 / (n * m) * kv * inv_s2;
      for (std::size_t t = 0; t < d; ++t) g[t] += scale * (yj[t] - xi[t]);
    }
  });
  return sxx / (n * n) + syy / (m * m) - 2.0 * (sxy / (n * m));
}

}  // namespace f2vs
