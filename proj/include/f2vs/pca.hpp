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

#ifndef F2VS_PCA_HPP
#define F2VS_PCA_HPP

#include <span>
#include <vector>

#include "f2vs/common.hpp"
#include "f2vs/embedding.hpp"

namespace f2vs {

// Principal-component basis. Component rows are orthonormal and carry a
// fixed sign convention (first coordinate above 1e-12 in magnitude is
// positive) so fits are reproducible.
struct PcaBasis {
  std::vector<double> mean;
  Mat components;  // n_components x dim
  std::vector<double> explained_variance;  // non-increasing, >= 0

  std::size_t dim() const { return mean.size(); }
  std::size_t n_components() const { return components.rows; }
};

// Fits by eigendecomposition of the sample covariance (n-1 denominator),
// cyclic Jacobi. Throws NumericError when total variance is zero.
PcaBasis pca_fit(const Mat& data, std::size_t n_components);
PcaBasis pca_fit(const EmbeddingSet& set, std::size_t n_components);

std::vector<double> pca_project(const PcaBasis& basis,
                                std::span<const double> x);
// Inverse of project on the component span: mean + sum coords_k * comp_k.
std::vector<double> pca_lift(const PcaBasis& basis,
                             std::span<const double> coords);

// Batch projection, one output row per input row.
Mat pca_project_rows(const PcaBasis& basis, const Mat& data);

// Sample covariance of the rows of data (parallel kernel).
Mat covariance(const Mat& data, std::span<const double> mean);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// On return evals[i] pairs with eigenvector column i of vecs; unsorted.
void jacobi_eigen(Mat a, std::vector<double>& evals, Mat& vecs);

}  // namespace f2vs

#endif  // F2VS_PCA_HPP
