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

#ifndef F2VS_LINALG_HPP
#define F2VS_LINALG_HPP

#include <cmath>
#include <span>
#include <vector>

#include "f2vs/common.hpp"
#include "f2vs/parallel.hpp"

namespace f2vs::la {

// y = A x. Each output row is one serial dot product, so the result does
// not depend on the thread count.
inline std::vector<double> matvec(const Mat& A, std::span<const double> x) {
  std::vector<double> y(A.rows);
  par::parallel_for(A.rows, [&](std::size_t i) {
    const double* r = A.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < A.cols; ++j) acc += r[j] * x[j];
    y[i] = acc;
  });
  return y;
}

// y = A^T x (x has A.rows entries). Parallel over output columns.
inline std::vector<double> matvec_t(const Mat& A, std::span<const double> x) {
  std::vector<double> y(A.cols);
  par::parallel_for(A.cols, [&](std::size_t j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < A.rows; ++i) acc += A.a[i * A.cols + j] * x[i];
    y[j] = acc;
  });
  return y;
}

// G += y x^T.
inline void add_outer(Mat& G, std::span<const double> y,
                      std::span<const double> x) {
  par::parallel_for(G.rows, [&](std::size_t i) {
    double* g = G.row(i);
    const double yi = y[i];
    for (std::size_t j = 0; j < G.cols; ++j) g[j] += yi * x[j];
  });
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, std::span<const double> x,
                 std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace f2vs::la

#endif  // F2VS_LINALG_HPP
