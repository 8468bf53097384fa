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

#include "f2vs/kde.hpp"

#include <cmath>

#include "f2vs/parallel.hpp"

namespace f2vs {

namespace {

constexpr double kBandwidthFloor = 1e-6;
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log sqrt(2 pi)

std::vector<double> column_stddev(const Mat& pts) {
  const std::size_t n = pts.rows;
  const std::size_t d = pts.cols;
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = pts.row(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = pts.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double c = x[j] - mean[j];
      var[j] += c * c;
    }
  }
  std::vector<double> sd(d);
  for (std::size_t j = 0; j < d; ++j) {
    sd[j] = std::sqrt(var[j] / static_cast<double>(n - 1));
  }
  return sd;
}

}  // namespace

KdeModel kde_fit(const Mat& points, BandwidthRule rule, double fixed_h) {
  require(points.rows >= 2, "kde_fit: need at least 2 points");
  require(points.cols >= 1, "kde_fit: need at least 1 dimension");
  const std::size_t n = points.rows;
  const std::size_t d = points.cols;

  KdeModel model;
  model.samples = points;
  model.bandwidth.assign(d, 0.0);

  if (rule == BandwidthRule::fixed) {
    require(fixed_h > 0.0, "kde_fit: fixed bandwidth must be positive");
    model.bandwidth.assign(d, fixed_h);
  } else {
    const double nd = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    double factor = std::pow(nd, -1.0 / (dd + 4.0));
    if (rule == BandwidthRule::silverman) {
      factor *= std::pow(4.0 / (dd + 2.0), 1.0 / (dd + 4.0));
    }
    const std::vector<double> sd = column_stddev(points);
    for (std::size_t j = 0; j < d; ++j) {
      double h = sd[j] * factor;
      if (h < kBandwidthFloor) {
        h = kBandwidthFloor;
        model.bandwidth_floored = true;
      }
      model.bandwidth[j] = h;
    }
  }

  double log_norm = -std::log(static_cast<double>(n));
  for (double h : model.bandwidth) log_norm -= std::log(h) + kLogSqrt2Pi;
  model.log_norm = log_norm;
  return model;
}

KdeModel kde_fit_scaled(const Mat& points, BandwidthRule rule, double factor) {
  require(factor > 0.0, "kde_fit_scaled: factor must be positive");
  KdeModel model = kde_fit(points, rule);
  for (double& h : model.bandwidth) {
    h = std::max(h * factor, kBandwidthFloor);
  }
  double log_norm = -std::log(static_cast<double>(model.n()));
  for (double h : model.bandwidth) log_norm -= std::log(h) + kLogSqrt2Pi;
  model.log_norm = log_norm;
  return model;
}

KdeModel kde_with_bandwidth(Mat points, std::vector<double> bandwidth) {
  require(points.rows >= 1, "kde_with_bandwidth: need at least 1 point");
  require(bandwidth.size() == points.cols,
          "kde_with_bandwidth: bandwidth size must match dimension");
  for (double h : bandwidth) {
    require(h > 0.0, "kde_with_bandwidth: bandwidths must be positive");
  }
  KdeModel model;
  model.samples = std::move(points);
  model.bandwidth = std::move(bandwidth);
  double log_norm = -std::log(static_cast<double>(model.n()));
  for (double h : model.bandwidth) log_norm -= std::log(h) + kLogSqrt2Pi;
  model.log_norm = log_norm;
  return model;
}

double kde_log_density(const KdeModel& model, std::span<const double> x) {
  require(x.size() == model.d(), "kde_log_density: dimension mismatch");
  const std::size_t n = model.n();
  const std::size_t d = model.d();

  // Pass 1: max exponent (order-independent), pass 2: sum of shifted exps.
  double max_e = -HUGE_VAL;
  for (std::size_t i = 0; i < n; ++i) {
    const double* s = model.samples.row(i);
    double e = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double z = (x[j] - s[j]) / model.bandwidth[j];
      e -= 0.5 * z * z;
    }
    if (e > max_e) max_e = e;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* s = model.samples.row(i);
    double e = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double z = (x[j] - s[j]) / model.bandwidth[j];
      e -= 0.5 * z * z;
    }
    sum += std::exp(e - max_e);
  }
  return model.log_norm + max_e + std::log(sum);
}

std::vector<double> kde_log_density_batch(const KdeModel& model,
                                          const Mat& xs) {
  require(xs.cols == model.d(), "kde_log_density_batch: dimension mismatch");
  std::vector<double> out(xs.rows);
  par::parallel_for(xs.rows, [&](std::size_t i) {
    out[i] = kde_log_density(model, xs.row_span(i));
  });
  return out;
}

std::vector<double> kde_sample(const KdeModel& model, RandomSource& rng) {
  const std::size_t row = rng.uniform_index(model.n());
  const double* s = model.samples.row(row);
  std::vector<double> x(model.d());
  for (std::size_t j = 0; j < model.d(); ++j) {
    x[j] = s[j] + model.bandwidth[j] * rng.gaussian();
  }
  return x;
}

}  // namespace f2vs
