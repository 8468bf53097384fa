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

#ifndef F2VS_SYNTHDATA_HPP
#define F2VS_SYNTHDATA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "f2vs/embedding.hpp"
#include "f2vs/random.hpp"

namespace f2vs {

// Synthetic paired face/voice corpus. Each speaker gets a unit-norm face
// prototype and a voice prototype derived from it through a fixed random
// map, so the two modalities share identity structure. Samples scatter
// around the prototypes with per-coordinate noise of std sigma/sqrt(dim),
// which puts the expected norm of the whole perturbation near sigma.
//
// Face prototypes are drawn from a face_rank-dimensional subspace of the
// 512-d face space rather than isotropically. A held-out prototype then
// lies in the span of the training prototypes, so the face-to-voice map
// restricted to that subspace is identifiable from a few dozen speakers
// and zero-shot evaluation measures generalization instead of asking the
// model to extrapolate into directions no training sample ever touched.
struct SynthConfig {
  std::size_t n_speakers = 50;
  std::size_t samples_per_speaker = 3;
  std::size_t face_rank = 8;
  double sigma_face = 0.1;
  double sigma_voice = 0.1;
  double holdout_fraction = 0.2;
  std::uint64_t map_seed = 1;   // prototypes and the face-to-voice map
  std::uint64_t data_seed = 2;  // sample noise and the train/test split
};

struct SynthData {
  EmbeddingSet faces;   // 512-d, unit norm
  EmbeddingSet voices;  // 192-d, unit norm, aligned with faces record-wise
  std::vector<std::string> train_labels;
  std::vector<std::string> test_labels;
};

SynthData generate_synth_data(const SynthConfig& config);

// Records whose label is in keep (order preserved from the source set).
EmbeddingSet subset_by_labels(const EmbeddingSet& set,
                              const std::vector<std::string>& keep);

// One "label,split" line per speaker, split in {train,test}, speaker order.
std::string render_split_manifest(const SynthData& data);

}  // namespace f2vs

#endif  // F2VS_SYNTHDATA_HPP
