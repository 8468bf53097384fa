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

#include "f2vs/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "f2vs/parallel.hpp"

namespace f2vs {
namespace {

constexpr double kVarianceFloor = 1e-6;
constexpr double kLog2Pi = 1.8378770664093454836;

double log_component_density(std::span<const double> x,
                             std::span<const double> mean,
                             std::span<const double> var) {
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - mean[j];
    acc += std::log(var[j]) + diff * diff / var[j];
  }
  return -0.5 * (acc + static_cast<double>(x.size()) * kLog2Pi);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    acc += diff * diff;
  }
  return acc;
}

// k-means++ seeding: spread the initial means out proportionally to the
// squared distance from the centers already chosen.
Mat kmeanspp_init(const Mat& points, std::size_t k, RandomSource& rng) {
  const std::size_t n = points.rows;
  Mat centers(k, points.cols);
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  chosen.push_back(rng.uniform_index(n));

  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    const auto last = points.row_span(chosen.back());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points.row_span(i), last));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double run = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        run += d2[i];
        if (run >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.uniform_index(n);
    }
    chosen.push_back(pick);
  }
  for (std::size_t c = 0; c < k; ++c) {
    const auto src = points.row_span(chosen[c]);
    std::copy(src.begin(), src.end(), centers.row(c));
  }
  return centers;
}

}  // namespace

GmmModel gmm_fit(const Mat& points, std::size_t k, RandomSource& rng,
                 std::size_t max_iter, double tol) {
  const std::size_t n = points.rows;
  const std::size_t d = points.cols;
  require(k >= 1, "gmm_fit: k must be at least 1");
  require(n >= k, "gmm_fit: need at least k points");
  require(d >= 1, "gmm_fit: dimension must be positive");

  GmmModel model;
  model.weights.assign(k, 1.0 / static_cast<double>(k));
  model.means = kmeanspp_init(points, k, rng);
  model.variances = Mat(k, d);

  // Start every component at the global per-dimension variance.
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = points.row_span(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
  }
  for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
  std::vector<double> gvar(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = points.row_span(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = row[j] - mean[j];
      gvar[j] += diff * diff;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    gvar[j] = std::max(gvar[j] / static_cast<double>(n), kVarianceFloor);
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::copy(gvar.begin(), gvar.end(), model.variances.row(c));
  }

  Mat resp(n, k);
  std::vector<double> log_w(k);
  double prev_ll = -std::numeric_limits<double>::infinity();

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    for (std::size_t c = 0; c < k; ++c) log_w[c] = std::log(model.weights[c]);

    // E-step: responsibilities and the per-point log-likelihood in one pass.
    const double ll = par::blocked_sum_terms(n, [&](std::size_t i) {
      const auto x = points.row_span(i);
      double* r = resp.row(i);
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        r[c] = log_w[c] + log_component_density(x, model.means.row_span(c),
                                                model.variances.row_span(c));
        mx = std::max(mx, r[c]);
      }
      double denom = 0.0;
      for (std::size_t c = 0; c < k; ++c) denom += std::exp(r[c] - mx);
      const double log_px = mx + std::log(denom);
      for (std::size_t c = 0; c < k; ++c) r[c] = std::exp(r[c] - log_px);
      return log_px;
    }) / static_cast<double>(n);

    if (!std::isfinite(ll)) {
      throw NumericError("gmm_fit: log-likelihood became non-finite");
    }
    model.loglik_trace.push_back(ll);
    if (ll - prev_ll < tol && iter > 0) {
      model.converged = true;
      break;
    }
    prev_ll = ll;

    // M-step. Serial accumulation keeps the result independent of the
    // thread count.
    for (std::size_t c = 0; c < k; ++c) {
      double nk = 0.0;
      std::vector<double> sum(d, 0.0);
      std::vector<double> sumsq(d, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double r = resp(i, c);
        nk += r;
        const auto x = points.row_span(i);
        for (std::size_t j = 0; j < d; ++j) {
          sum[j] += r * x[j];
          sumsq[j] += r * x[j] * x[j];
        }
      }
      nk = std::max(nk, 1e-12);
      model.weights[c] = nk / static_cast<double>(n);
      double* mu = model.means.row(c);
      double* var = model.variances.row(c);
      for (std::size_t j = 0; j < d; ++j) {
        mu[j] = sum[j] / nk;
        var[j] = std::max(sumsq[j] / nk - mu[j] * mu[j], kVarianceFloor);
      }
    }
    double wsum = 0.0;
    for (double w : model.weights) wsum += w;
    for (double& w : model.weights) w /= wsum;
  }
  return model;
}

double gmm_log_density(const GmmModel& model, std::span<const double> x) {
  require(x.size() == model.d(), "gmm_log_density: dimension mismatch");
  const std::size_t k = model.k();
  double mx = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(k, -std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < k; ++c) {
    if (model.weights[c] <= 0.0) continue;
    terms[c] = std::log(model.weights[c]) +
               log_component_density(x, model.means.row_span(c),
                                     model.variances.row_span(c));
    mx = std::max(mx, terms[c]);
  }
  if (!std::isfinite(mx)) {
    throw NumericError("gmm_log_density: all components have zero weight");
  }
  double acc = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    if (std::isfinite(terms[c])) acc += std::exp(terms[c] - mx);
  }
  return mx + std::log(acc);
}

std::vector<double> gmm_log_density_batch(const GmmModel& model,
                                          const Mat& xs) {
  require(xs.cols == model.d(), "gmm_log_density_batch: dimension mismatch");
  std::vector<double> out(xs.rows);
  par::parallel_for(xs.rows, [&](std::size_t i) {
    out[i] = gmm_log_density(model, xs.row_span(i));
  });
  return out;
}

std::vector<double> gmm_sample(const GmmModel& model, RandomSource& rng) {
  const std::size_t k = model.k();
  const double target = rng.uniform();
  double run = 0.0;
  std::size_t pick = k - 1;
  for (std::size_t c = 0; c < k; ++c) {
    run += model.weights[c];
    if (run >= target) {
      pick = c;
      break;
    }
  }
  std::vector<double> out(model.d());
  const auto mu = model.means.row_span(pick);
  const auto var = model.variances.row_span(pick);
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = mu[j] + std::sqrt(var[j]) * rng.gaussian();
  }
  return out;
}

}  // namespace f2vs
