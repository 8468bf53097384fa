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

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "f2vs/dcts.hpp"
#include "f2vs/synthdata.hpp"
#include "util.hpp"

using namespace f2vs;

namespace {

bool sets_equal(const EmbeddingSet& a, const EmbeddingSet& b) {
  if (a.size() != b.size() || a.dim() != b.dim()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.label_name(a.label_id(i)) != b.label_name(b.label_id(i))) {
      return false;
    }
    const auto va = a.vec(i);
    const auto vb = b.vec(i);
    for (std::size_t j = 0; j < va.size(); ++j) {
      if (va[j] != vb[j]) return false;
    }
  }
  return true;
}

double norm_of(std::span<const float> v) {
  double sq = 0.0;
  for (const float x : v) sq += double(x) * double(x);
  return std::sqrt(sq);
}

// Number of linearly independent rows, by modified Gram-Schmidt.
std::size_t numerical_rank(const EmbeddingSet& set) {
  std::vector<std::vector<double>> kept;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto v = set.vec(i);
    std::vector<double> r(v.begin(), v.end());
    for (const auto& q : kept) {
      double dot = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) dot += r[j] * q[j];
      for (std::size_t j = 0; j < r.size(); ++j) r[j] -= dot * q[j];
    }
    double nrm = 0.0;
    for (const double x : r) nrm += x * x;
    nrm = std::sqrt(nrm);
    // float32 storage leaves residuals near 1e-5 on in-span vectors; a
    // genuinely independent unit vector keeps residual O(1).
    if (nrm > 1e-3) {
      for (double& x : r) x /= nrm;
      kept.push_back(std::move(r));
    }
  }
  return kept.size();
}

}  // namespace

TEST_SUITE("synthdata") {

TEST_CASE("shapes, labels and unit norms") {
  SynthConfig sc;
  sc.n_speakers = 10;
  sc.samples_per_speaker = 3;
  const SynthData data = generate_synth_data(sc);

  CHECK(data.faces.dim() == 512);
  CHECK(data.voices.dim() == 192);
  CHECK(data.faces.size() == 30);
  CHECK(data.voices.size() == 30);
  CHECK(data.faces.num_classes() == 10);
  CHECK(data.faces.label_names()[0] == "spk0000");
  CHECK(data.faces.label_names()[9] == "spk0009");
  for (std::size_t i = 0; i < data.faces.size(); ++i) {
    CHECK(data.faces.label_name(data.faces.label_id(i)) ==
          data.voices.label_name(data.voices.label_id(i)));
    CHECK(norm_of(data.faces.vec(i)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(norm_of(data.voices.vec(i)) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("zero noise collapses samples onto the prototype") {
  SynthConfig sc;
  sc.n_speakers = 4;
  sc.samples_per_speaker = 3;
  sc.sigma_face = 0.0;
  sc.sigma_voice = 0.0;
  const SynthData data = generate_synth_data(sc);
  for (std::uint32_t c = 0; c < 4; ++c) {
    const auto& members = data.faces.class_members(c);
    REQUIRE(members.size() == 3);
    const auto first = data.faces.vec(members[0]);
    for (const std::size_t m : members) {
      const auto v = data.faces.vec(m);
      for (std::size_t j = 0; j < v.size(); ++j) CHECK(v[j] == first[j]);
    }
  }
}

TEST_CASE("generation is a pure function of the seeds") {
  SynthConfig sc;
  sc.n_speakers = 6;
  sc.samples_per_speaker = 2;
  const SynthData a = generate_synth_data(sc);
  const SynthData b = generate_synth_data(sc);
  CHECK(sets_equal(a.faces, b.faces));
  CHECK(sets_equal(a.voices, b.voices));
  CHECK(a.train_labels == b.train_labels);
  CHECK(a.test_labels == b.test_labels);
}

TEST_CASE("map seed pins prototypes across data seeds") {
  SynthConfig sc;
  sc.n_speakers = 5;
  sc.samples_per_speaker = 2;
  sc.sigma_face = 0.0;
  sc.sigma_voice = 0.0;
  sc.data_seed = 21;
  const SynthData a = generate_synth_data(sc);
  sc.data_seed = 22;  // only the noise and split stream changes
  const SynthData b = generate_synth_data(sc);
  CHECK(sets_equal(a.faces, b.faces));
  CHECK(sets_equal(a.voices, b.voices));

  sc.map_seed += 100;  // new prototypes
  const SynthData c = generate_synth_data(sc);
  CHECK(!sets_equal(a.faces, c.faces));
}

TEST_CASE("split is a partition with the configured holdout") {
  SynthConfig sc;
  sc.n_speakers = 50;
  sc.samples_per_speaker = 2;
  sc.holdout_fraction = 0.2;
  const SynthData data = generate_synth_data(sc);
  CHECK(data.test_labels.size() == 10);  // floor(0.2 * 50)
  CHECK(data.train_labels.size() == 40);
  std::set<std::string> train(data.train_labels.begin(),
                              data.train_labels.end());
  std::set<std::string> test(data.test_labels.begin(),
                             data.test_labels.end());
  CHECK(train.size() == 40);
  CHECK(test.size() == 10);
  for (const auto& label : test) CHECK(train.find(label) == train.end());
  std::set<std::string> all = train;
  all.insert(test.begin(), test.end());
  CHECK(all.size() == 50);

  sc.holdout_fraction = 0.0;
  const SynthData full = generate_synth_data(sc);
  CHECK(full.test_labels.empty());
  CHECK(full.train_labels.size() == 50);
}

TEST_CASE("voices carry class structure that widens with noise") {
  SynthConfig sc;
  sc.n_speakers = 12;
  sc.samples_per_speaker = 6;
  sc.sigma_voice = 0.1;
  sc.map_seed = 23;
  sc.data_seed = 24;
  DctsConfig dc;
  dc.n_intra_tuples = 400;
  dc.n_inter_tuples = 400;
  dc.n_pairs = 1000;
  dc.n_eval = 1000;
  dc.seed = 25;

  const DctsReport tight =
      evaluate_dcts(generate_synth_data(sc).voices, dc);
  CHECK(tight.dcts > 0.6);

  sc.sigma_voice = 0.4;
  const DctsReport wide = evaluate_dcts(generate_synth_data(sc).voices, dc);
  CHECK(tight.dcts > wide.dcts);
}

TEST_CASE("label subsetting preserves record order") {
  SynthConfig sc;
  sc.n_speakers = 5;
  sc.samples_per_speaker = 2;
  const SynthData data = generate_synth_data(sc);
  const std::vector<std::string> keep = {"spk0001", "spk0003"};
  const EmbeddingSet sub = subset_by_labels(data.faces, keep);
  CHECK(sub.size() == 4);
  CHECK(sub.num_classes() == 2);
  // record order: both spk0001 samples precede both spk0003 samples
  CHECK(sub.label_name(sub.label_id(0)) == "spk0001");
  CHECK(sub.label_name(sub.label_id(1)) == "spk0001");
  CHECK(sub.label_name(sub.label_id(2)) == "spk0003");
  CHECK(sub.label_name(sub.label_id(3)) == "spk0003");
  const auto orig = data.faces.vec(2);  // first spk0001 record
  const auto got = sub.vec(0);
  for (std::size_t j = 0; j < orig.size(); ++j) CHECK(orig[j] == got[j]);

  CHECK_THROWS_AS(subset_by_labels(data.faces, {"spk9999"}), ValidationError);
}

TEST_CASE("split manifest lists every speaker once") {
  SynthConfig sc;
  sc.n_speakers = 10;
  sc.samples_per_speaker = 2;
  sc.holdout_fraction = 0.3;
  const SynthData data = generate_synth_data(sc);
  const std::string manifest = render_split_manifest(data);
  std::stringstream ss(manifest);
  std::string line;
  REQUIRE(std::getline(ss, line));
  CHECK(line == "label,split");
  std::size_t train_rows = 0, test_rows = 0;
  std::set<std::string> seen;
  while (std::getline(ss, line)) {
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    seen.insert(line.substr(0, comma));
    const std::string split = line.substr(comma + 1);
    if (split == "train") {
      ++train_rows;
    } else {
      CHECK(split == "test");
      ++test_rows;
    }
  }
  CHECK(seen.size() == 10);
  CHECK(train_rows == 7);
  CHECK(test_rows == 3);
}

TEST_CASE("face prototypes span a face_rank subspace") {
  // With zero noise every sample equals its prototype, so the whole set's
  // rank is the prototype subspace dimension: held-out speakers stay inside
  // the span the training speakers expose.
  SynthConfig sc;
  sc.n_speakers = 20;
  sc.samples_per_speaker = 1;
  sc.sigma_face = 0.0;
  sc.sigma_voice = 0.0;
  const SynthData at_default = generate_synth_data(sc);
  CHECK(numerical_rank(at_default.faces) == SynthConfig{}.face_rank);

  sc.face_rank = 4;
  const SynthData at_four = generate_synth_data(sc);
  CHECK(numerical_rank(at_four.faces) == 4);
}

TEST_CASE("config validation") {
  SynthConfig sc;
  sc.n_speakers = 1;
  CHECK_THROWS_AS(generate_synth_data(sc), ValidationError);
  sc = SynthConfig{};
  sc.samples_per_speaker = 0;
  CHECK_THROWS_AS(generate_synth_data(sc), ValidationError);
  sc = SynthConfig{};
  sc.sigma_face = -0.1;
  CHECK_THROWS_AS(generate_synth_data(sc), ValidationError);
  sc = SynthConfig{};
  sc.holdout_fraction = 1.0;
  CHECK_THROWS_AS(generate_synth_data(sc), ValidationError);
  sc = SynthConfig{};
  sc.face_rank = 1;
  CHECK_THROWS_AS(generate_synth_data(sc), ValidationError);
  sc = SynthConfig{};
  sc.face_rank = 513;
  CHECK_THROWS_AS(generate_synth_data(sc), ValidationError);
}

}  // TEST_SUITE
