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

#include "f2vs/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "f2vs/parallel.hpp"

namespace f2vs {

Mat covariance(const Mat& data, std::span<const double> mean) {
  const std::size_t n = data.rows;
  const std::size_t d = data.cols;
  // Centered transpose: row r holds coordinate r of every sample, so each
  // covariance entry is a contiguous dot product.
  Mat ct(d, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = data.row(i);
    for (std::size_t j = 0; j < d; ++j) ct(j, i) = x[j] - mean[j];
  }
  Mat cov(d, d);
  par::parallel_for(d, [&](std::size_t r) {
    const double* xr = ct.row(r);
    for (std::size_t c = r; c < d; ++c) {
      const double* xc = ct.row(c);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += xr[i] * xc[i];
      cov(r, c) = s / static_cast<double>(n - 1);
    }
  });
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < r; ++c) cov(r, c) = cov(c, r);
  }
  return cov;
}

void jacobi_eigen(Mat a, std::vector<double>& evals, Mat& vecs) {
  const std::size_t d = a.rows;
  vecs = Mat(d, d);
  for (std::size_t i = 0; i < d; ++i) vecs(i, i) = 1.0;

  double norm2 = 0.0;
  for (double v : a.a) norm2 += v * v;
  const double stop = std::max(1e-30 * norm2, 1e-300);

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off2 = 0.0;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) off2 += 2.0 * a(p, q) * a(p, q);
    }
    if (off2 <= stop) break;

    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = tau >= 0.0
                             ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                             : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = vecs(k, p);
          const double vkq = vecs(k, q);
          vecs(k, p) = c * vkp - s * vkq;
          vecs(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  evals.resize(d);
  for (std::size_t i = 0; i < d; ++i) evals[i] = a(i, i);
}

PcaBasis pca_fit(const Mat& data, std::size_t n_components) {
  const std::size_t n = data.rows;
  const std::size_t d = data.cols;
  require(n >= 2, "pca_fit: need at least 2 records");
  require(n_components >= 1, "pca_fit: n_components must be positive");
  require(n_components <= std::min(d, n),
          "pca_fit: n_components exceeds min(dim, record count)");

  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = data.row(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
  }
  for (double& m : mean) m /= static_cast<double>(n);

  Mat cov = covariance(data, mean);
  double total_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) total_var += cov(j, j);
  if (total_var <= 1e-300) {
    throw NumericError("pca_fit: degenerate data (zero total variance)");
  }

  std::vector<double> evals;
  Mat vecs;
  jacobi_eigen(cov, evals, vecs);

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) {
                     return evals[i] > evals[j];
                   });

  PcaBasis basis;
  basis.mean = std::move(mean);
  basis.components = Mat(n_components, d);
  basis.explained_variance.resize(n_components);
  for (std::size_t k = 0; k < n_components; ++k) {
    const std::size_t col = order[k];
    basis.explained_variance[k] = std::max(evals[col], 0.0);
    double* comp = basis.components.row(k);
    for (std::size_t j = 0; j < d; ++j) comp[j] = vecs(j, col);
    // Sign convention: first nonzero coordinate positive.
    for (std::size_t j = 0; j < d; ++j) {
      if (std::abs(comp[j]) > 1e-12) {
        if (comp[j] < 0.0) {
          for (std::size_t m = 0; m < d; ++m) comp[m] = -comp[m];
        }
        break;
      }
    }
  }
  return basis;
}

PcaBasis pca_fit(const EmbeddingSet& set, std::size_t n_components) {
  Mat data(set.size(), set.dim());
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto v = set.vec(i);
    for (std::size_t j = 0; j < v.size(); ++j) data(i, j) = v[j];
  }
  return pca_fit(data, n_components);
}

std::vector<double> pca_project(const PcaBasis& basis,
                                std::span<const double> x) {
  require(x.size() == basis.dim(), "pca_project: dimension mismatch");
  const std::size_t d = basis.dim();
  std::vector<double> coords(basis.n_components());
  for (std::size_t k = 0; k < basis.n_components(); ++k) {
    const double* comp = basis.components.row(k);
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += comp[j] * (x[j] - basis.mean[j]);
    coords[k] = s;
  }
  return coords;
}

std::vector<double> pca_lift(const PcaBasis& basis,
                             std::span<const double> coords) {
  require(coords.size() == basis.n_components(),
          "pca_lift: coordinate count mismatch");
  std::vector<double> x(basis.mean.begin(), basis.mean.end());
  for (std::size_t k = 0; k < basis.n_components(); ++k) {
    const double* comp = basis.components.row(k);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += coords[k] * comp[j];
  }
  return x;
}

Mat pca_project_rows(const PcaBasis& basis, const Mat& data) {
  require(data.cols == basis.dim(), "pca_project_rows: dimension mismatch");
  Mat out(data.rows, basis.n_components());
  par::parallel_for(data.rows, [&](std::size_t i) {
    const double* x = data.row(i);
    for (std::size_t k = 0; k < basis.n_components(); ++k) {
      const double* comp = basis.components.row(k);
      double s = 0.0;
      for (std::size_t j = 0; j < data.cols; ++j) {
        s += comp[j] * (x[j] - basis.mean[j]);
      }
      out(i, k) = s;
    }
  });
  return out;
}

}  // namespace f2vs
