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

#ifndef F2VS_EMBEDDING_HPP
#define F2VS_EMBEDDING_HPP

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "f2vs/common.hpp"

namespace f2vs {

// A single embedding vector. Values are stored as float32, matching the
// on-disk record format, so binary round-trips are bit-exact.
using Embedding = std::vector<float>;

// Immutable labeled collection of same-dimension embeddings. Vectors are
// stored flat; labels are interned to dense ids in first-appearance order.
// Safe to share across threads once built.
class EmbeddingSet {
 public:
  class Builder {
   public:
    explicit Builder(std::size_t dim) : dim_(dim) {}
    Builder& add(const std::string& label, std::span<const float> vec);
    EmbeddingSet build();  // validates: >= 1 record, finite values

   private:
    std::size_t dim_;
    std::vector<std::string> label_names_;
    std::unordered_map<std::string, std::uint32_t> label_ids_;
    std::vector<std::uint32_t> record_labels_;
    std::vector<float> values_;
  };

  // Empty set (no records, dim 0); assign a built set before use.
  EmbeddingSet() = default;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return record_labels_.size(); }
  std::size_t num_classes() const { return label_names_.size(); }

  std::span<const float> vec(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::uint32_t label_id(std::size_t i) const { return record_labels_[i]; }
  const std::string& label_name(std::uint32_t id) const {
    return label_names_[id];
  }
  const std::vector<std::string>& label_names() const { return label_names_; }

  // O(1) class count; members are record indices in insertion order.
  std::size_t class_count(std::uint32_t id) const {
    return class_members_[id].size();
  }
  const std::vector<std::size_t>& class_members(std::uint32_t id) const {
    return class_members_[id];
  }

  // Record vector as doubles (numeric modules work in double).
  std::vector<double> vec_double(std::size_t i) const;

 private:
  friend class Builder;

  std::size_t dim_ = 0;
  std::vector<std::string> label_names_;
  std::vector<std::uint32_t> record_labels_;
  std::vector<float> values_;
  std::vector<std::vector<std::size_t>> class_members_;
};

// Cosine similarity on raw vectors, clamped to [-1, 1] against rounding.
// Throws ValidationError on dimension mismatch or zero-norm input.
double cosine_similarity(std::span<const float> a, std::span<const float> b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// 1 - cosine_similarity, in [0, 2].
double cosine_distance(std::span<const float> a, std::span<const float> b);
double cosine_distance(std::span<const double> a, std::span<const double> b);

enum class EmbeddingFormat { binary, jsonl };

// Binary layout: magic "EMB1", then LE u32 record_count, u32 dim,
// u32 label_count, the label table (u32 id, u16 name_len, UTF-8 name),
// then records of (u32 label_id, dim x float32 LE).
EmbeddingSet read_embeddings(const std::string& path, EmbeddingFormat format);
void write_embeddings(const EmbeddingSet& set, const std::string& path,
                      EmbeddingFormat format);

}  // namespace f2vs

#endif  // F2VS_EMBEDDING_HPP
