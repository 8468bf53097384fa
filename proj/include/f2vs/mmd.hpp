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

#ifndef F2VS_MMD_HPP
#define F2VS_MMD_HPP

#include <span>

#include "f2vs/common.hpp"

namespace f2vs {

// RBF kernel k(a, b) = exp(-||a - b||^2 / (2 sigma^2)).
double rbf_kernel(std::span<const double> a, std::span<const double> b,
                  double sigma);

// Median of the pairwise Euclidean distances over the pooled rows of x and
// y, floored at 1e-6 so degenerate batches cannot produce a zero bandwidth.
double median_heuristic_bandwidth(const Mat& x, const Mat& y);

// Biased V-statistic. Includes diagonal terms; evaluates to exactly zero
// when x and y hold identical rows.
double mmd2_biased(const Mat& x, const Mat& y, double sigma);

// Unbiased U-statistic (diagonal terms removed from the within-set sums).
// Needs at least two rows on each side and can go negative.
double mmd2_unbiased(const Mat& x, const Mat& y, double sigma);

// Biased estimate plus its gradient with respect to the rows of x; y and
// sigma are treated as constants. grad_x is resized to x's shape.
double mmd2_biased_with_grad(const Mat& x, const Mat& y, double sigma,
                             Mat* grad_x);

}  // namespace f2vs

#endif  // F2VS_MMD_HPP
