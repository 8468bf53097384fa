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

#ifndef F2VS_TESTS_UTIL_HPP
#define F2VS_TESTS_UTIL_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "f2vs/common.hpp"
#include "f2vs/embedding.hpp"
#include "f2vs/random.hpp"

namespace f2vs::testutil {

inline Mat gaussian_mat(std::size_t rows, std::size_t cols,
                        RandomSource& rng) {
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
  }
  return m;
}

// Random unit-norm class centers plus per-sample noise, re-normalized.
// `sigma` is the expected norm of the whole perturbation (per-coordinate
// std sigma/sqrt(dim)), matching the synthetic corpus convention.
inline EmbeddingSet clustered_set(std::size_t n_classes,
                                  std::size_t per_class, std::size_t dim,
                                  double sigma, std::uint64_t seed) {
  RandomSource rng(seed);
  const double scale = sigma / std::sqrt(static_cast<double>(dim));
  EmbeddingSet::Builder builder(dim);
  std::vector<double> center(dim), v(dim);
  std::vector<float> rec(dim);
  for (std::size_t c = 0; c < n_classes; ++c) {
    double sq = 0.0;
    for (double& x : center) {
      x = rng.gaussian();
      sq += x * x;
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : center) x *= inv;
    for (std::size_t i = 0; i < per_class; ++i) {
      double vsq = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        v[j] = center[j] + scale * rng.gaussian();
        vsq += v[j] * v[j];
      }
      const double vinv = 1.0 / std::sqrt(vsq);
      for (std::size_t j = 0; j < dim; ++j) {
        rec[j] = static_cast<float>(v[j] * vinv);
      }
      builder.add("c" + std::to_string(c), rec);
    }
  }
  return builder.build();
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("f2vs_tests_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot read ", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace f2vs::testutil

#endif  // F2VS_TESTS_UTIL_HPP
