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

#ifndef F2VS_GMM_HPP
#define F2VS_GMM_HPP

#include <span>
#include <vector>

#include "f2vs/common.hpp"
#include "f2vs/random.hpp"

namespace f2vs {

// Diagonal-covariance Gaussian mixture fitted by EM.
struct GmmModel {
  std::vector<double> weights;  // simplex
  Mat means;                    // k x d
  Mat variances;                // k x d, floored at 1e-6
  std::vector<double> loglik_trace;  // mean log-likelihood per EM iteration
  bool converged = false;

  std::size_t k() const { return weights.size(); }
  std::size_t d() const { return means.cols; }
};

// EM with k-means++ initialization drawn from rng. Stops when the mean
// log-likelihood gain drops below tol or after max_iter iterations.
GmmModel gmm_fit(const Mat& points, std::size_t k, RandomSource& rng,
                 std::size_t max_iter = 200, double tol = 1e-6);

double gmm_log_density(const GmmModel& model, std::span<const double> x);
std::vector<double> gmm_log_density_batch(const GmmModel& model,
                                          const Mat& xs);

// Ancestral sampling: component by weight, then the diagonal Gaussian.
std::vector<double> gmm_sample(const GmmModel& model, RandomSource& rng);

}  // namespace f2vs

#endif  // F2VS_GMM_HPP
