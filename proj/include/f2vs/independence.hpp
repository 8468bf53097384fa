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

#ifndef F2VS_INDEPENDENCE_HPP
#define F2VS_INDEPENDENCE_HPP

#include <cstdint>
#include <string>

#include "f2vs/common.hpp"
#include "f2vs/random.hpp"

namespace f2vs {

// n tuples of k vectors each; slot j of tuple i occupies columns
// [j*dim, (j+1)*dim) of row i.
struct TupleSet {
  std::size_t k = 0;
  std::size_t dim = 0;
  Mat data;  // n x (k * dim)

  std::size_t size() const { return data.rows; }
};

enum class EstimatorKind { kde, gmm };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::kde;
  // KDE: Scott-rule bandwidth times this factor, quoted for a
  // two-dimensional joint; the estimator rescales it as the joint dimension
  // grows (see estimate_independence). Calibrated on gaussian benchmarks
  // where the total correlation is known in closed form.
  double kde_bandwidth_factor = 0.65;
  // GMM: components for the joint and each marginal fit.
  std::size_t gmm_components = 8;

  std::string describe() const;
};

// Total correlation KL(p || prod_k q_k) of a tuple distribution, in nats.
struct IndependenceEstimate {
  double value = 0.0;  // clamped at 0
  double raw = 0.0;    // mean log ratio before clamping
  bool clamped = false;
  std::size_t n_tuples = 0;
  std::size_t k = 0;
  std::size_t projection_dims = 0;
  std::string estimator;
};

// Projects every slot to projection_dims through one PCA basis fitted on
// the pooled slot vectors, fits a joint density on the concatenated
// coordinates and one marginal per slot, then estimates the KL as the mean
// log density ratio over the observed tuples (a random subset of them when
// n_eval is smaller than the set). Negative means are clamped to zero with
// the flag set.
IndependenceEstimate estimate_independence(const TupleSet& tuples,
                                           const EstimatorSpec& estimator,
                                           std::size_t projection_dims,
                                           std::size_t n_eval,
                                           RandomSource& rng);

// Analytic oracle: total correlation of a zero-mean Gaussian with the
// given correlation matrix is -0.5 * ln det R.
double gaussian_total_correlation(const Mat& correlation);

}  // namespace f2vs

#endif  // F2VS_INDEPENDENCE_HPP
