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

#ifndef F2VS_TRAIN_HPP
#define F2VS_TRAIN_HPP

#include <string>
#include <vector>

#include "f2vs/embedding.hpp"
#include "f2vs/losses.hpp"
#include "f2vs/surrogate.hpp"

namespace f2vs {

// Throws ValidationError unless faces (512-d) and voices (192-d) have the
// same record count with matching label names at every index.
void validate_paired(const EmbeddingSet& faces, const EmbeddingSet& voices);

struct EpochLog {
  std::size_t epoch = 0;
  LossTerms terms;  // sample-weighted means over the epoch's batches
};

struct TrainLog {
  std::vector<EpochLog> epochs;
};

// CSV: epoch,l_rec,l_con,l_cen,l_mmd,total
std::string render_stage1_log(const TrainLog& log);
// CSV: epoch,l_tts,l_vec,total
std::string render_stage2_log(const TrainLog& log);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t t = 0;
};

AdamState make_adam_state(const AdapterModel& model);
void adam_step(AdapterModel& model, const AdapterModel& grad, AdamState& state,
               double lr, double beta1, double beta2, double epsilon);

struct Stage1Result {
  AdapterModel model;
  CenterBank bank;
  TrainLog log;
};

// Per-epoch shuffling, Adam updates, detached center updates after each
// step. Deterministic function of (data, config).
Stage1Result train_stage1(const EmbeddingSet& faces,
                          const EmbeddingSet& voices,
                          const Stage1Config& config);

struct Stage2Result {
  AdapterModel model;
  TrainLog log;
};

Stage2Result train_stage2(AdapterModel model, const EmbeddingSet& faces,
                          const EmbeddingSet& voices,
                          const SurrogateStack& stack,
                          const Stage2Config& config);

// Mean cos(decode(mu(v)), target) over all records.
double mean_validation_cosine(const AdapterModel& model,
                              const EmbeddingSet& faces,
                              const EmbeddingSet& voices);

// Runs faces through the adapter to build a labeled voice set.
// draws_per_face z-samples per record when sample_latent_path is true,
// a single z = mu pass otherwise. keep_labels, when non-empty, filters
// records to those label names.
EmbeddingSet generate_voices(const AdapterModel& model,
                             const EmbeddingSet& faces,
                             const std::vector<std::string>& keep_labels,
                             std::size_t draws_per_face,
                             bool sample_latent_path, RandomSource& rng);

}  // namespace f2vs

#endif  // F2VS_TRAIN_HPP
