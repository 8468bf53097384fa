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
#include "f2vs/kde.hpp"
#include "f2vs/random.hpp"
#include "f2vs/reference.hpp"
#include "util.hpp"

using namespace f2vs;

namespace {

double sample_stddev(const Mat& pts, std::size_t col) {
  double mean = 0.0;
  for (std::size_t i = 0; i < pts.rows; ++i) mean += pts(i, col);
  mean /= static_cast<double>(pts.rows);
  double var = 0.0;
  for (std::size_t i = 0; i < pts.rows; ++i) {
    const double c = pts(i, col) - mean;
    var += c * c;
  }
  return std::sqrt(var / static_cast<double>(pts.rows - 1));
}

// Trapezoid integral of the fitted density over [lo, hi].
double integrate_1d(const KdeModel& model, double lo, double hi,
                    std::size_t steps) {
  const double dx = (hi - lo) / static_cast<double>(steps);
  double acc = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double x = lo + dx * static_cast<double>(i);
    const double f =
        std::exp(kde_log_density(model, std::span<const double>(&x, 1)));
    acc += (i == 0 || i == steps) ? 0.5 * f : f;
  }
  return acc * dx;
}

}  // namespace

TEST_SUITE("kde") {

TEST_CASE("scott and silverman bandwidth formulas") {
  RandomSource rng(2);
  const Mat pts = testutil::gaussian_mat(100, 1, rng);
  const double sd = sample_stddev(pts, 0);

  const KdeModel scott = kde_fit(pts, BandwidthRule::scott);
  CHECK(scott.bandwidth[0] ==
        doctest::Approx(sd * std::pow(100.0, -0.2)).epsilon(1e-12));
  CHECK_FALSE(scott.bandwidth_floored);

  const KdeModel silverman = kde_fit(pts, BandwidthRule::silverman);
  const double factor = std::pow(4.0 / 3.0, 0.2);
  CHECK(silverman.bandwidth[0] ==
        doctest::Approx(sd * factor * std::pow(100.0, -0.2)).epsilon(1e-12));
}

TEST_CASE("constant column hits the bandwidth floor") {
  Mat pts(10, 2);
  RandomSource rng(3);
  for (std::size_t i = 0; i < 10; ++i) {
    pts(i, 0) = rng.gaussian();
    pts(i, 1) = 4.2;
  }
  const KdeModel model = kde_fit(pts, BandwidthRule::scott);
  CHECK(model.bandwidth_floored);
  CHECK(model.bandwidth[1] == 1e-6);
  CHECK(model.bandwidth[0] > 1e-3);
}

TEST_CASE("fixed bandwidth applies to every dimension") {
  RandomSource rng(4);
  const Mat pts = testutil::gaussian_mat(20, 3, rng);
  const KdeModel model = kde_fit(pts, BandwidthRule::fixed, 0.5);
  for (const double h : model.bandwidth) CHECK(h == 0.5);
  CHECK_THROWS_AS(kde_fit(pts, BandwidthRule::fixed, 0.0), ValidationError);
}

TEST_CASE("single kernel log density at its own center") {
  Mat pts(1, 1);
  pts(0, 0) = 1.7;
  const KdeModel model = kde_with_bandwidth(pts, {1.0});
  const double x = 1.7;
  CHECK(kde_log_density(model, std::span<const double>(&x, 1)) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("density integrates to one in 1-d") {
  RandomSource rng(6);
  Mat pts(60, 1);
  for (std::size_t i = 0; i < 60; ++i) {
    pts(i, 0) = (i < 30 ? -1.5 : 2.0) + 0.7 * rng.gaussian();
  }
  const KdeModel model = kde_fit(pts, BandwidthRule::scott);
  CHECK(integrate_1d(model, -12.0, 12.0, 4000) ==
        doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("density integrates to one in 2-d") {
  RandomSource rng(7);
  const Mat pts = testutil::gaussian_mat(40, 2, rng);
  const KdeModel model = kde_fit(pts, BandwidthRule::scott);
  const double lo = -8.0, hi = 8.0;
  const std::size_t steps = 240;
  const double dx = (hi - lo) / static_cast<double>(steps);
  double acc = 0.0;
  std::vector<double> x(2);
  for (std::size_t i = 0; i <= steps; ++i) {
    x[0] = lo + dx * static_cast<double>(i);
    const double wa = (i == 0 || i == steps) ? 0.5 : 1.0;
    for (std::size_t j = 0; j <= steps; ++j) {
      x[1] = lo + dx * static_cast<double>(j);
      const double wb = (j == 0 || j == steps) ? 0.5 : 1.0;
      acc += wa * wb * std::exp(kde_log_density(model, x));
    }
  }
  CHECK(acc * dx * dx == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("far field stays finite") {
  RandomSource rng(8);
  const Mat pts = testutil::gaussian_mat(15, 1, rng);
  const KdeModel model = kde_fit(pts, BandwidthRule::scott);
  const double far = 1e4;
  const double lp = kde_log_density(model, std::span<const double>(&far, 1));
  CHECK(std::isfinite(lp));
  CHECK(lp < -1e6);
}

TEST_CASE("batch evaluation matches pointwise and the serial reference") {
  RandomSource rng(9);
  const Mat pts = testutil::gaussian_mat(80, 2, rng);
  const Mat eval = testutil::gaussian_mat(25, 2, rng);
  const KdeModel model = kde_fit(pts, BandwidthRule::silverman);
  const std::vector<double> batch = kde_log_density_batch(model, eval);
  const std::vector<double> serial = ref::kde_log_density_batch(model, eval);
  REQUIRE(batch.size() == 25);
  for (std::size_t i = 0; i < 25; ++i) {
    CHECK(batch[i] == doctest::Approx(kde_log_density(model, eval.row_span(i)))
                          .epsilon(1e-12));
    CHECK(batch[i] == doctest::Approx(serial[i]).epsilon(1e-9));
  }
}

TEST_CASE("scaled fit multiplies every bandwidth") {
  RandomSource rng(10);
  const Mat pts = testutil::gaussian_mat(50, 2, rng);
  const KdeModel base = kde_fit(pts, BandwidthRule::scott);
  const KdeModel scaled = kde_fit_scaled(pts, BandwidthRule::scott, 0.5);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(scaled.bandwidth[j] ==
          doctest::Approx(0.5 * base.bandwidth[j]).epsilon(1e-12));
  }
}

TEST_CASE("sampling reproduces the mixture mean") {
  RandomSource rng(12);
  Mat pts(40, 1);
  for (std::size_t i = 0; i < 40; ++i) pts(i, 0) = rng.gaussian() + 3.0;
  double data_mean = 0.0;
  for (std::size_t i = 0; i < 40; ++i) data_mean += pts(i, 0);
  data_mean /= 40.0;

  const KdeModel model = kde_fit(pts, BandwidthRule::scott);
  RandomSource draw_rng(13);
  double acc = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) acc += kde_sample(model, draw_rng)[0];
  CHECK(acc / n == doctest::Approx(data_mean).epsilon(0.02));
}

TEST_CASE("input validation") {
  Mat one(1, 1);
  one(0, 0) = 0.0;
  CHECK_THROWS_AS(kde_fit(one, BandwidthRule::scott), ValidationError);
  RandomSource rng(14);
  const Mat pts = testutil::gaussian_mat(10, 2, rng);
  const KdeModel model = kde_fit(pts, BandwidthRule::scott);
  const std::vector<double> wrong(3, 0.0);
  CHECK_THROWS_AS(kde_log_density(model, std::span<const double>(wrong)),
                  ValidationError);
  CHECK_THROWS_AS(kde_with_bandwidth(pts, {0.1}), ValidationError);
  CHECK_THROWS_AS(kde_with_bandwidth(pts, {0.1, 0.0}), ValidationError);
}

}  // TEST_SUITE
