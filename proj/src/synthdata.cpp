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

#include "f2vs/synthdata.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "f2vs/adapter.hpp"
#include "f2vs/common.hpp"

namespace f2vs {
namespace {

void normalize_in_place(std::vector<double>& v) {
  double sq = 0.0;
  for (const double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  require(norm > 0.0, "synthdata: degenerate zero vector");
  for (double& x : v) x /= norm;
}

std::string speaker_label(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "spk%04zu", i);
  return buf;
}

std::vector<float> noisy_sample(const std::vector<double>& proto, double sigma,
                                RandomSource& rng) {
  const std::size_t dim = proto.size();
  const double scale = sigma / std::sqrt(static_cast<double>(dim));
  std::vector<double> v(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    v[j] = proto[j] + scale * rng.gaussian();
  }
  normalize_in_place(v);
  std::vector<float> out(dim);
  for (std::size_t j = 0; j < dim; ++j) out[j] = static_cast<float>(v[j]);
  return out;
}

}  // namespace

SynthData generate_synth_data(const SynthConfig& config) {
  require(config.n_speakers >= 2, "synthdata: need at least two speakers");
  require(config.samples_per_speaker >= 1,
          "synthdata: need at least one sample per speaker");
  require(config.sigma_face >= 0.0 && config.sigma_voice >= 0.0,
          "synthdata: sigma must be non-negative");
  require(config.face_rank >= 2 && config.face_rank <= kFaceDim,
          "synthdata: face_rank must be in [2, face_dim]");
  require(config.holdout_fraction >= 0.0 && config.holdout_fraction < 1.0,
          "synthdata: holdout_fraction must be in [0, 1)");

  const RandomSource map_root(config.map_seed);
  RandomSource map_rng = map_root.split(0);
  RandomSource proto_rng = map_root.split(1);
  RandomSource basis_rng = map_root.split(2);

  // Fixed voice map, row-major 192 x 512.
  std::vector<double> voice_map(kVoiceDim * kFaceDim);
  for (double& w : voice_map) w = map_rng.gaussian();

  // Orthonormal basis of the prototype subspace, column-major 512 x rank.
  const std::size_t rank = config.face_rank;
  std::vector<std::vector<double>> basis(rank);
  for (std::size_t c = 0; c < rank; ++c) {
    auto& col = basis[c];
    col.resize(kFaceDim);
    for (double& x : col) x = basis_rng.gaussian();
    for (std::size_t prev = 0; prev < c; ++prev) {
      double dot = 0.0;
      for (std::size_t j = 0; j < kFaceDim; ++j) dot += col[j] * basis[prev][j];
      for (std::size_t j = 0; j < kFaceDim; ++j) col[j] -= dot * basis[prev][j];
    }
    normalize_in_place(col);
  }

  std::vector<std::vector<double>> face_protos(config.n_speakers);
  std::vector<std::vector<double>> voice_protos(config.n_speakers);
  for (std::size_t s = 0; s < config.n_speakers; ++s) {
    auto& f = face_protos[s];
    f.assign(kFaceDim, 0.0);
    for (std::size_t c = 0; c < rank; ++c) {
      const double coeff = proto_rng.gaussian();
      for (std::size_t j = 0; j < kFaceDim; ++j) f[j] += coeff * basis[c][j];
    }
    normalize_in_place(f);

    auto& u = voice_protos[s];
    u.resize(kVoiceDim);
    for (std::size_t r = 0; r < kVoiceDim; ++r) {
      const double* row = voice_map.data() + r * kFaceDim;
      double acc = 0.0;
      for (std::size_t j = 0; j < kFaceDim; ++j) acc += row[j] * f[j];
      u[r] = std::tanh(acc);
    }
    normalize_in_place(u);
  }

  const RandomSource data_root(config.data_seed);
  EmbeddingSet::Builder faces(kFaceDim);
  EmbeddingSet::Builder voices(kVoiceDim);
  for (std::size_t s = 0; s < config.n_speakers; ++s) {
    // One noise stream per speaker so adding speakers does not reshuffle
    // the samples of existing ones.
    RandomSource noise = data_root.split(s);
    const std::string label = speaker_label(s);
    for (std::size_t i = 0; i < config.samples_per_speaker; ++i) {
      const auto fv = noisy_sample(face_protos[s], config.sigma_face, noise);
      const auto vv = noisy_sample(voice_protos[s], config.sigma_voice, noise);
      faces.add(label, fv);
      voices.add(label, vv);
    }
  }

  // Speaker-level split; a speaker's samples never straddle train/test.
  RandomSource split_rng = data_root.split(config.n_speakers);
  std::vector<std::size_t> order(config.n_speakers);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = split_rng.uniform_index(i);
    std::swap(order[i - 1], order[j]);
  }
  const std::size_t n_test = static_cast<std::size_t>(
      config.holdout_fraction * static_cast<double>(config.n_speakers));
  std::unordered_set<std::size_t> test_set(order.begin(),
                                           order.begin() + n_test);

  SynthData out;
  out.faces = faces.build();
  out.voices = voices.build();
  for (std::size_t s = 0; s < config.n_speakers; ++s) {
    if (test_set.count(s)) {
      out.test_labels.push_back(speaker_label(s));
    } else {
      out.train_labels.push_back(speaker_label(s));
    }
  }
  return out;
}

EmbeddingSet subset_by_labels(const EmbeddingSet& set,
                              const std::vector<std::string>& keep) {
  require(!keep.empty(), "subset_by_labels: empty label list");
  std::unordered_set<std::string> wanted(keep.begin(), keep.end());
  EmbeddingSet::Builder builder(set.dim());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::string& name = set.label_name(set.label_id(i));
    if (wanted.count(name)) builder.add(name, set.vec(i));
  }
  return builder.build();
}

std::string render_split_manifest(const SynthData& data) {
  std::unordered_set<std::string> test(data.test_labels.begin(),
                                       data.test_labels.end());
  std::string out = "label,split\n";
  const std::size_t total = data.train_labels.size() + data.test_labels.size();
  for (std::size_t s = 0; s < total; ++s) {
    const std::string label = speaker_label(s);
    out += label;
    out += test.count(label) ? ",test\n" : ",train\n";
  }
  return out;
}

}  // namespace f2vs
