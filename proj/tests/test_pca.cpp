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

#include <cmath>

#include "doctest.h"
#include "f2vs/pca.hpp"
#include "f2vs/random.hpp"
#include "util.hpp"

using namespace f2vs;

TEST_SUITE("pca") {

TEST_CASE("points on the diagonal force the symmetric component") {
  Mat pts(4, 2);
  const double xs[] = {-1.0, 0.5, 2.0, 3.5};
  for (int i = 0; i < 4; ++i) {
    pts(i, 0) = xs[i];
    pts(i, 1) = xs[i];
  }
  const PcaBasis basis = pca_fit(pts, 1);
  REQUIRE(basis.n_components() == 1);
  CHECK(basis.components(0, 0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(basis.components(0, 1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
}

TEST_CASE("isotropic data has near-equal explained variances") {
  RandomSource rng(11);
  const Mat pts = testutil::gaussian_mat(10000, 2, rng);
  const PcaBasis basis = pca_fit(pts, 2);
  REQUIRE(basis.explained_variance.size() == 2);
  CHECK(basis.explained_variance[0] >= basis.explained_variance[1]);
  CHECK(basis.explained_variance[1] / basis.explained_variance[0] > 0.95);
}

TEST_CASE("full basis round trips points") {
  RandomSource rng(5);
  const Mat pts = testutil::gaussian_mat(40, 6, rng);
  const PcaBasis basis = pca_fit(pts, 6);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto proj = pca_project(basis, pts.row_span(i));
    const auto lifted = pca_lift(basis, proj);
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(std::abs(lifted[j] - pts(i, j)) <= 1e-6);
    }
  }
}

TEST_CASE("projection of the mean is zero and of mean+component is a unit") {
  RandomSource rng(9);
  const Mat pts = testutil::gaussian_mat(50, 4, rng);
  const PcaBasis basis = pca_fit(pts, 3);

  const auto at_mean = pca_project(basis, basis.mean);
  for (const double c : at_mean) CHECK(std::abs(c) <= 1e-9);

  std::vector<double> shifted(4);
  for (std::size_t j = 0; j < 4; ++j) {
    shifted[j] = basis.mean[j] + basis.components(0, j);
  }
  const auto coords = pca_project(basis, shifted);
  CHECK(coords[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(coords[1]) <= 1e-9);
  CHECK(std::abs(coords[2]) <= 1e-9);
}

TEST_CASE("components are orthonormal and variances non-increasing") {
  RandomSource rng(21);
  Mat pts = testutil::gaussian_mat(300, 5, rng);
  // Stretch one direction so the spectrum is distinct.
  for (std::size_t i = 0; i < pts.rows; ++i) pts(i, 0) *= 3.0;
  const PcaBasis basis = pca_fit(pts, 5);
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = 0; b < 5; ++b) {
      double dot = 0.0;
      for (std::size_t j = 0; j < 5; ++j) {
        dot += basis.components(a, j) * basis.components(b, j);
      }
      CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-6);
    }
  }
  for (std::size_t a = 1; a < 5; ++a) {
    CHECK(basis.explained_variance[a - 1] >=
          basis.explained_variance[a] - 1e-12);
  }
}

TEST_CASE("projected fitting sample is uncorrelated across components") {
  RandomSource rng(33);
  Mat pts = testutil::gaussian_mat(400, 3, rng);
  for (std::size_t i = 0; i < pts.rows; ++i) {
    pts(i, 1) = 0.8 * pts(i, 0) + 0.3 * pts(i, 1);  // correlate inputs
  }
  const PcaBasis basis = pca_fit(pts, 3);
  const Mat proj = pca_project_rows(basis, pts);
  std::vector<double> mean(3, 0.0);
  for (std::size_t i = 0; i < proj.rows; ++i) {
    for (std::size_t j = 0; j < 3; ++j) mean[j] += proj(i, j);
  }
  for (double& m : mean) m /= static_cast<double>(proj.rows);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a + 1; b < 3; ++b) {
      double cov = 0.0;
      for (std::size_t i = 0; i < proj.rows; ++i) {
        cov += (proj(i, a) - mean[a]) * (proj(i, b) - mean[b]);
      }
      cov /= static_cast<double>(proj.rows - 1);
      CHECK(std::abs(cov) <= 1e-6);
    }
  }
}

TEST_CASE("explained variance is bounded by the total variance") {
  RandomSource rng(8);
  const Mat pts = testutil::gaussian_mat(200, 4, rng);
  const PcaBasis basis = pca_fit(pts, 2);
  std::vector<double> mean(4, 0.0);
  for (std::size_t i = 0; i < pts.rows; ++i) {
    for (std::size_t j = 0; j < 4; ++j) mean[j] += pts(i, j);
  }
  for (double& m : mean) m /= static_cast<double>(pts.rows);
  double total = 0.0;
  for (std::size_t i = 0; i < pts.rows; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double c = pts(i, j) - mean[j];
      total += c * c;
    }
  }
  total /= static_cast<double>(pts.rows - 1);
  double kept = 0.0;
  for (const double v : basis.explained_variance) kept += v;
  CHECK(kept <= total + 1e-9);
}

TEST_CASE("degenerate data is rejected") {
  Mat pts(5, 3);
  for (std::size_t i = 0; i < 5; ++i) {
    pts(i, 0) = 1.0;
    pts(i, 1) = 2.0;
    pts(i, 2) = 3.0;
  }
  CHECK_THROWS_AS(pca_fit(pts, 1), NumericError);
}

TEST_CASE("input validation") {
  RandomSource rng(1);
  const Mat pts = testutil::gaussian_mat(4, 3, rng);
  CHECK_THROWS_AS(pca_fit(pts, 0), ValidationError);
  CHECK_THROWS_AS(pca_fit(pts, 4), ValidationError);
  Mat one(1, 3);
  CHECK_THROWS_AS(pca_fit(one, 1), ValidationError);
  const PcaBasis basis = pca_fit(pts, 2);
  const std::vector<double> wrong(5, 0.0);
  CHECK_THROWS_AS(pca_project(basis, std::span<const double>(wrong)),
                  ValidationError);
}

TEST_CASE("fit is deterministic for identical input") {
  RandomSource rng(55);
  const Mat pts = testutil::gaussian_mat(120, 4, rng);
  const PcaBasis a = pca_fit(pts, 3);
  const PcaBasis b = pca_fit(pts, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.explained_variance[i] == b.explained_variance[i]);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(a.components(i, j) == b.components(i, j));
    }
  }
}

}  // TEST_SUITE
