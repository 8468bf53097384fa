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

#ifndef F2VS_KDE_HPP
#define F2VS_KDE_HPP

#include <span>
#include <vector>

#include "f2vs/common.hpp"
#include "f2vs/random.hpp"

namespace f2vs {

enum class BandwidthRule { scott, silverman, fixed };

// Gaussian-kernel density estimate with a per-dimension bandwidth.
struct KdeModel {
  Mat samples;                    // n x d
  std::vector<double> bandwidth;  // per-dimension, > 0
  bool bandwidth_floored = false; // a zero-variance column hit the 1e-6 floor
  double log_norm = 0.0;          // -log n - sum_j log(h_j sqrt(2 pi))

  std::size_t n() const { return samples.rows; }
  std::size_t d() const { return samples.cols; }
};

// Scott: h_j = sigma_j n^(-1/(d+4)). Silverman adds the (4/(d+2))^(1/(d+4))
// factor. sigma_j is the per-dimension sample standard deviation (n-1);
// zero sigma is replaced by the 1e-6 floor and flagged.
KdeModel kde_fit(const Mat& points, BandwidthRule rule, double fixed_h = 0.0);

// As kde_fit but every bandwidth is scaled by `factor` afterwards.
KdeModel kde_fit_scaled(const Mat& points, BandwidthRule rule, double factor);

// Builds a model from points and an explicit per-dimension bandwidth, so a
// joint fit and its marginals can share the exact same smoothing.
KdeModel kde_with_bandwidth(Mat points, std::vector<double> bandwidth);

// Log of the mixture density at x, computed with log-sum-exp.
double kde_log_density(const KdeModel& model, std::span<const double> x);

// One output per row of xs; rows are evaluated in parallel.
std::vector<double> kde_log_density_batch(const KdeModel& model,
                                          const Mat& xs);

// Draw from the fitted density: a uniformly chosen sample row plus
// per-dimension kernel noise.
std::vector<double> kde_sample(const KdeModel& model, RandomSource& rng);

}  // namespace f2vs

#endif  // F2VS_KDE_HPP
