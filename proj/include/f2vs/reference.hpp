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

#ifndef F2VS_REFERENCE_HPP
#define F2VS_REFERENCE_HPP

#include <span>
#include <vector>

#include "f2vs/common.hpp"
#include "f2vs/kde.hpp"

namespace f2vs::ref {

// Plain serial versions of the parallel kernels. Written as naive nested
// loops so the tests and benchmarks have an obviously-correct baseline;
// they accumulate in a different order than the blocked kernels, so
// comparisons use a tolerance rather than exact equality.

double mmd2_biased(const Mat& x, const Mat& y, double sigma);
double mmd2_unbiased(const Mat& x, const Mat& y, double sigma);
double median_heuristic_bandwidth(const Mat& x, const Mat& y);
std::vector<double> kde_log_density_batch(const KdeModel& model,
                                          const Mat& points);
Mat covariance(const Mat& data, std::span<const double> mean);

}  // namespace f2vs::ref

#endif  // F2VS_REFERENCE_HPP
