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

#include <cstddef>
#include <vector>

#include "doctest.h"
#include "f2vs/linalg.hpp"
#include "f2vs/parallel.hpp"
#include "f2vs/random.hpp"
#include "util.hpp"

using namespace f2vs;

namespace {

// The same block-ordered reduction, run serially. blocked_sum promises
// bit-identical results, so every comparison below is exact.
template <class F>
double serial_blocked_sum(std::size_t n, F&& body, std::size_t block = 1024) {
  double acc = 0.0;
  for (std::size_t lo = 0; lo < n; lo += block) {
    const std::size_t hi = std::min(n, lo + block);
    acc += body(lo, hi);
  }
  return acc;
}

std::vector<double> random_vec(std::size_t n, RandomSource& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.gaussian();
  return v;
}

Mat random_mat(std::size_t r, std::size_t c, RandomSource& rng) {
  Mat m(r, c);
  for (double& x : m.a) x = rng.gaussian();
  return m;
}

}  // namespace

TEST_SUITE("parallel") {

TEST_CASE("blocked_sum matches the serial block order bit for bit") {
  RandomSource rng(171);
  // gaussians make the sum order-sensitive, so agreement means the
  // reduction really is block-ordered
  const std::vector<double> v = random_vec(5000, rng);
  const auto body = [&](std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += v[i];
    return acc;
  };
  CHECK(par::blocked_sum(v.size(), body) ==
        serial_blocked_sum(v.size(), body));
  CHECK(par::blocked_sum(v.size(), body, 64) ==
        serial_blocked_sum(v.size(), body, 64));
  CHECK(par::blocked_sum(100, body, 1024) ==
        serial_blocked_sum(100, body, 1024));  // single partial block
  CHECK(par::blocked_sum(0, body) == 0.0);
}

TEST_CASE("parallel_for visits every index exactly once") {
  const std::size_t n = 10007;
  std::vector<int> hits(n, 0);
  par::parallel_for(n, [&](std::size_t i) { hits[i] += 1; });
  for (std::size_t i = 0; i < n; ++i) {
    if (hits[i] != 1) {
      CAPTURE(i);
      REQUIRE(hits[i] == 1);
    }
  }
  CHECK(par::max_threads() >= 1);
  par::parallel_for(0, [&](std::size_t) { REQUIRE(false); });
}

TEST_CASE("matvec kernels agree with naive loops exactly") {
  RandomSource rng(172);
  const Mat A = random_mat(37, 53, rng);
  const std::vector<double> x = random_vec(53, rng);
  const std::vector<double> xt = random_vec(37, rng);

  const std::vector<double> y = la::matvec(A, x);
  REQUIRE(y.size() == 37);
  for (std::size_t i = 0; i < A.rows; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < A.cols; ++j) acc += A(i, j) * x[j];
    CHECK(y[i] == acc);
  }

  const std::vector<double> z = la::matvec_t(A, xt);
  REQUIRE(z.size() == 53);
  for (std::size_t j = 0; j < A.cols; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < A.rows; ++i) acc += A(i, j) * xt[i];
    CHECK(z[j] == acc);
  }
}

TEST_CASE("add_outer accumulates y x^T exactly") {
  RandomSource rng(173);
  Mat G = random_mat(11, 7, rng);
  const Mat G0 = G;
  const std::vector<double> y = random_vec(11, rng);
  const std::vector<double> x = random_vec(7, rng);
  la::add_outer(G, y, x);
  for (std::size_t i = 0; i < G.rows; ++i) {
    for (std::size_t j = 0; j < G.cols; ++j) {
      CHECK(G(i, j) == G0(i, j) + y[i] * x[j]);
    }
  }
}

TEST_CASE("dot, norm and axpy") {
  const std::vector<double> a = {1.0, 2.0, -3.0};
  const std::vector<double> b = {4.0, 0.5, 2.0};
  CHECK(la::dot(a, b) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(la::norm(std::span<const double>{b}) ==
        doctest::Approx(std::sqrt(20.25)).epsilon(1e-15));
  std::vector<double> y = {1.0, 1.0, 1.0};
  la::axpy(2.0, a, y);
  CHECK(y[0] == 3.0);
  CHECK(y[1] == 5.0);
  CHECK(y[2] == -5.0);
}

}  // TEST_SUITE
