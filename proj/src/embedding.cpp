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

#include "f2vs/embedding.hpp"

#include <algorithm>
#include <cmath>

namespace f2vs {

EmbeddingSet::Builder& EmbeddingSet::Builder::add(const std::string& label,
                                                  std::span<const float> vec) {
  require(vec.size() == dim_, "embedding dimension mismatch: expected " +
                                  std::to_string(dim_) + ", got " +
                                  std::to_string(vec.size()));
  auto it = label_ids_.find(label);
  std::uint32_t id;
  if (it == label_ids_.end()) {
    id = static_cast<std::uint32_t>(label_names_.size());
    label_ids_.emplace(label, id);
    label_names_.push_back(label);
  } else {
    id = it->second;
  }
  record_labels_.push_back(id);
  values_.insert(values_.end(), vec.begin(), vec.end());
  return *this;
}

EmbeddingSet EmbeddingSet::Builder::build() {
  require(dim_ > 0, "embedding dimension must be positive");
  require(!record_labels_.empty(), "embedding set must contain at least one record");
  for (float v : values_) {
    if (!std::isfinite(v)) {
      throw ValidationError("embedding set contains non-finite values");
    }
  }
  EmbeddingSet set;
  set.dim_ = dim_;
  set.label_names_ = std::move(label_names_);
  set.record_labels_ = std::move(record_labels_);
  set.values_ = std::move(values_);
  set.class_members_.resize(set.label_names_.size());
  for (std::size_t i = 0; i < set.record_labels_.size(); ++i) {
    set.class_members_[set.record_labels_[i]].push_back(i);
  }
  return set;
}

std::vector<double> EmbeddingSet::vec_double(std::size_t i) const {
  auto v = vec(i);
  return std::vector<double>(v.begin(), v.end());
}

namespace {

template <class T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
  require(a.size() == b.size(), "cosine: dimension mismatch");
  require(!a.empty(), "cosine: empty vectors");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = static_cast<double>(a[i]);
    const double y = static_cast<double>(b[i]);
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na <= 0.0 || nb <= 0.0) {
    throw ValidationError("cosine: zero-norm input");
  }
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  return cosine_impl(a, b);
}
double cosine_similarity(std::span<const double> a,
                         std::span<const double> b) {
  return cosine_impl(a, b);
}
double cosine_distance(std::span<const float> a, std::span<const float> b) {
  return 1.0 - cosine_impl(a, b);
}
double cosine_distance(std::span<const double> a, std::span<const double> b) {
  return 1.0 - cosine_impl(a, b);
}

}  // namespace f2vs
