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

#include "f2vs/reference.hpp"

#include <algorithm>
#include <cmath>

namespace f2vs::ref {
namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    acc += d * d;
  }
  return acc;
}

double kernel(std::span<const double> a, std::span<const double> b,
              double sigma) {
  return std::exp(-sq_dist(a, b) / (2.0 * sigma * sigma));
}

}  // namespace

double mmd2_biased(const Mat& x, const Mat& y, double sigma) {
  require(x.cols == y.cols, "ref::mmd2: dimension mismatch");
  require(x.rows >= 1 && y.rows >= 1, "ref::mmd2: empty input");
  require(sigma > 0.0, "ref::mmd2: sigma must be positive");
  const double n = static_cast<double>(x.rows);
  const double m = static_cast<double>(y.rows);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.rows; ++j) {
      sxx += kernel(x.row_span(i), x.row_span(j), sigma);
    }
  }
  for (std::size_t i = 0; i < y.rows; ++i) {
    for (std::size_t j = 0; j < y.rows; ++j) {
      syy += kernel(y.row_span(i), y.row_span(j), sigma);
    }
  }
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < y.rows; ++j) {
      sxy += kernel(x.row_span(i), y.row_span(j), sigma);
    }
  }
  return sxx / (n * n) + syy / (m * m) - 2.0 * (sxy / (n * m));
}

double mmd2_unbiased(const Mat& x, const Mat& y, double sigma) {
  require(x.cols == y.cols, "ref::mmd2: dimension mismatch");
  require(x.rows >= 2 && y.rows >= 2,
          "ref::mmd2_unbiased: need at least two rows per side");
  require(sigma > 0.0, "ref::mmd2: sigma must be positive");
  const double n = static_cast<double>(x.rows);
  const double m = static_cast<double>(y.rows);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.rows; ++j) {
      if (i == j) continue;
      sxx += kernel(x.row_span(i), x.row_span(j), sigma);
    }
  }
  for (std::size_t i = 0; i < y.rows; ++i) {
    for (std::size_t j = 0; j < y.rows; ++j) {
      if (i == j) continue;
      syy += kernel(y.row_span(i), y.row_span(j), sigma);
    }
  }
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < y.rows; ++j) {
      sxy += kernel(x.row_span(i), y.row_span(j), sigma);
    }
  }
  return sxx / (n * (n - 1.0)) + syy / (m * (m - 1.0)) -
         2.0 * (sxy / (n * m));
}

double median_heuristic_bandwidth(const Mat& x, const Mat& y) {
  require(x.cols == y.cols, "ref::median: dimension mismatch");
  const std::size_t n = x.rows + y.rows;
  require(n >= 2, "ref::median: need at least two points");
  Mat pooled(n, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    std::copy(x.row(i), x.row(i) + x.cols, pooled.row(i));
  }
  for (std::size_t i = 0; i < y.rows; ++i) {
    std::copy(y.row(i), y.row(i) + y.cols, pooled.row(x.rows + i));
  }
  std::vector<double> dists;
  dists.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dists.push_back(std::sqrt(sq_dist(pooled.row_span(i),
                                        pooled.row_span(j))));
    }
  }
  std::sort(dists.begin(), dists.end());
  const std::size_t mid = dists.size() / 2;
  double median = dists[mid];
  if (dists.size() % 2 == 0) median = 0.5 * (median + dists[mid - 1]);
  return std::max(median, 1e-6);
}

std::vector<double> kde_log_density_batch(const KdeModel& model,
                                          const Mat& points) {
  require(points.cols == model.d(), "ref::kde: dimension mismatch");
  std::vector<double> out(points.rows);
  for (std::size_t i = 0; i < points.rows; ++i) {
    const double* t = points.row(i);
    double maxe = -HUGE_VAL;
    std::vector<double> exponents(model.n());
    for (std::size_t s = 0; s < model.n(); ++s) {
      const double* p = model.samples.row(s);
      double e = 0.0;
      for (std::size_t j = 0; j < model.d(); ++j) {
        const double z = (t[j] - p[j]) / model.bandwidth[j];
        e -= 0.5 * z * z;
      }
      exponents[s] = e;
      maxe = std::max(maxe, e);
    }
    double acc = 0.0;
    for (const double e : exponents) acc += std::exp(e - maxe);
    out[i] = maxe + std::log(acc) + model.log_norm;
  }
  return out;
}

Mat covariance(const Mat& data, std::span<const double> mean) {
  require(data.rows >= 2, "ref::covariance: need at least two rows");
  require(mean.size() == data.cols, "ref::covariance: mean size mismatch");
  Mat cov(data.cols, data.cols);
  for (std::size_t a = 0; a < data.cols; ++a) {
    for (std::size_t b = 0; b < data.cols; ++b) {
      double acc = 0.0;
      for (std::size_t i = 0; i < data.rows; ++i) {
        acc += (data(i, a) - mean[a]) * (data(i, b) - mean[b]);
      }
      cov(a, b) = acc / static_cast<double>(data.rows - 1);
    }
  }
  return cov;
}

}  // namespace f2vs::ref
