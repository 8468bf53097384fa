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
#include <cstring>
#include <vector>

#include "doctest.h"
#include "f2vs/surrogate.hpp"
#include "f2vs/synthdata.hpp"
#include "f2vs/train.hpp"
#include "util.hpp"

using namespace f2vs;

namespace {

bool stacks_equal(const SurrogateStack& a, const SurrogateStack& b) {
  return a.tts_map.a == b.tts_map.a && a.tts_bias == b.tts_bias &&
         a.spk_map.a == b.spk_map.a && a.vec_map.a == b.vec_map.a;
}

bool adapters_equal(AdapterModel& a, AdapterModel& b) {
  const auto ba = param_blocks(a);
  const auto bb = param_blocks(b);
  for (std::size_t i = 0; i < ba.size(); ++i) {
    if (std::memcmp(ba[i].data, bb[i].data, ba[i].size * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

struct PairedData {
  EmbeddingSet faces;
  EmbeddingSet voices;
};

PairedData small_paired(std::uint64_t seed) {
  SynthConfig sc;
  sc.n_speakers = 6;
  sc.samples_per_speaker = 2;
  sc.holdout_fraction = 0.0;
  sc.map_seed = seed;
  sc.data_seed = seed + 1;
  SynthData data = generate_synth_data(sc);
  return {std::move(data.faces), std::move(data.voices)};
}

}  // namespace

TEST_SUITE("surrogate") {

TEST_CASE("zero input with zero bias maps to zero everywhere") {
  SurrogateStack stack = make_surrogate(5);
  for (double& b : stack.tts_bias) b = 0.0;
  const std::vector<double> s(kVoiceDim, 0.0);
  const SurrogateOut out = surrogate_forward(stack, s);
  REQUIRE(out.audio.size() == kAudioDim);
  REQUIRE(out.spk.size() == kVoiceDim);
  REQUIRE(out.vec.size() == kVecDim);
  for (const double x : out.audio) CHECK(x == 0.0);
  for (const double x : out.spk) CHECK(x == 0.0);
  for (const double x : out.vec) CHECK(x == 0.0);
}

TEST_CASE("construction is a pure function of the seed") {
  const SurrogateStack a = make_surrogate(7);
  const SurrogateStack b = make_surrogate(7);
  const SurrogateStack c = make_surrogate(8);
  CHECK(stacks_equal(a, b));
  CHECK(!stacks_equal(a, c));
  CHECK(a.seed == 7);

  RandomSource rng(141);
  std::vector<double> s(kVoiceDim);
  for (double& x : s) x = rng.gaussian();
  const SurrogateOut oa = surrogate_forward(a, s);
  const SurrogateOut ob = surrogate_forward(b, s);
  CHECK(oa.audio == ob.audio);
  CHECK(oa.spk == ob.spk);
  CHECK(oa.vec == ob.vec);
}

TEST_CASE("audio stays inside the tanh range") {
  const SurrogateStack stack = make_surrogate(9);
  RandomSource rng(142);
  std::vector<double> s(kVoiceDim);
  for (double& x : s) x = 3.0 * rng.gaussian();
  const SurrogateOut out = surrogate_forward(stack, s);
  for (const double x : out.audio) {
    CHECK(x > -1.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("chain jacobian matches finite differences") {
  const SurrogateStack stack = make_surrogate(10);
  RandomSource rng(143);
  std::vector<double> s(kVoiceDim);
  for (double& x : s) x = 0.5 * rng.gaussian();
  const SurrogateOut base = surrogate_forward(stack, s);

  // d vec_r / d s_c = sum_j vec_map(r, j) (1 - audio_j^2) tts_map(j, c)
  const std::size_t r = 17;
  const double h = 1e-6;
  for (const std::size_t c : {std::size_t{0}, std::size_t{91}}) {
    double analytic = 0.0;
    for (std::size_t j = 0; j < kAudioDim; ++j) {
      analytic += stack.vec_map(r, j) * (1.0 - base.audio[j] * base.audio[j]) *
                  stack.tts_map(j, c);
    }
    const double keep = s[c];
    s[c] = keep + h;
    const double up = surrogate_forward(stack, s).vec[r];
    s[c] = keep - h;
    const double dn = surrogate_forward(stack, s).vec[r];
    s[c] = keep;
    const double fd = (up - dn) / (2.0 * h);
    const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-7});
    CHECK(std::abs(fd - analytic) / scale <= 1e-6);
  }
}

TEST_CASE("loss vanishes when targets equal predictions") {
  const PairedData data = small_paired(144);
  RandomSource init_rng(145);
  const AdapterModel model = adapter_init(16, init_rng);
  const SurrogateStack stack = make_surrogate(3);
  Stage2Config config;

  const std::size_t n = data.faces.size();
  Mat faces(n, kFaceDim), targets(n, kVoiceDim);
  std::vector<std::uint32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = data.faces.vec(i);
    const auto t = data.voices.vec(i);
    for (std::size_t j = 0; j < kFaceDim; ++j) faces(i, j) = f[j];
    for (std::size_t j = 0; j < kVoiceDim; ++j) targets(i, j) = t[j];
    labels[i] = data.faces.label_id(i);
  }
  RandomSource noise_rng(146);
  const Stage2Noise noise = draw_stage2_noise(n, 16, noise_rng);

  const GradientBundle first = loss_stage2(
      model, stack, BatchView{faces, targets, labels}, config, noise);
  CHECK(first.terms.total > 0.0);

  const Mat matched = first.s_pred;
  const LossTerms self = loss_stage2_value(
      model, stack, BatchView{faces, matched, labels}, config, noise);
  CHECK(self.vec == 0.0);
  CHECK(self.tts <= 1e-12);
  CHECK(self.total <= 1e-12);
}

TEST_CASE("disabled stage 2 terms yield zero gradients") {
  const PairedData data = small_paired(147);
  RandomSource init_rng(148);
  const AdapterModel model = adapter_init(16, init_rng);
  const SurrogateStack stack = make_surrogate(4);
  Stage2Config config;
  config.lambda_tts = 0.0;
  config.lambda_vec = 0.0;

  const std::size_t n = data.faces.size();
  Mat faces(n, kFaceDim), targets(n, kVoiceDim);
  std::vector<std::uint32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = data.faces.vec(i);
    const auto t = data.voices.vec(i);
    for (std::size_t j = 0; j < kFaceDim; ++j) faces(i, j) = f[j];
    for (std::size_t j = 0; j < kVoiceDim; ++j) targets(i, j) = t[j];
    labels[i] = data.faces.label_id(i);
  }
  RandomSource noise_rng(149);
  const Stage2Noise noise = draw_stage2_noise(n, 16, noise_rng);
  GradientBundle bundle = loss_stage2(
      model, stack, BatchView{faces, targets, labels}, config, noise);
  CHECK(bundle.terms.total == 0.0);
  for (const auto& block : param_blocks(bundle.grad)) {
    for (std::size_t i = 0; i < block.size; ++i) {
      CHECK(block.data[i] == 0.0);
    }
  }
}

TEST_CASE("training leaves the surrogate frozen") {
  const PairedData data = small_paired(150);
  RandomSource init_rng(151);
  const AdapterModel init = adapter_init(16, init_rng);
  const SurrogateStack stack = make_surrogate(6);
  const SurrogateStack before = stack;

  Stage2Config config;
  config.batch_size = 6;
  config.learning_rate = 1e-3;
  config.epochs = 5;
  config.seed = 152;
  const Stage2Result result =
      train_stage2(init, data.faces, data.voices, stack, config);
  CHECK(stacks_equal(stack, before));

  AdapterModel trained = result.model;
  AdapterModel initial = init;
  CHECK(!adapters_equal(trained, initial));  // lr > 0 must move something
}

TEST_CASE("zero learning rate leaves the adapter untouched") {
  const PairedData data = small_paired(153);
  RandomSource init_rng(154);
  const AdapterModel init = adapter_init(16, init_rng);
  const SurrogateStack stack = make_surrogate(6);
  Stage2Config config;
  config.batch_size = 6;
  config.learning_rate = 0.0;
  config.epochs = 3;
  config.seed = 155;
  const Stage2Result result =
      train_stage2(init, data.faces, data.voices, stack, config);
  AdapterModel out = result.model;
  AdapterModel in = init;
  CHECK(adapters_equal(out, in));
  CHECK(result.log.epochs.size() == 3);
}

TEST_CASE("stage 2 training is deterministic and reduces its loss") {
  const PairedData data = small_paired(156);
  RandomSource init_rng(157);
  const AdapterModel init = adapter_init(16, init_rng);
  const SurrogateStack stack = make_surrogate(6);
  Stage2Config config;
  config.batch_size = 12;
  config.learning_rate = 1e-3;
  config.epochs = 30;
  config.seed = 158;

  const Stage2Result a =
      train_stage2(init, data.faces, data.voices, stack, config);
  const Stage2Result b =
      train_stage2(init, data.faces, data.voices, stack, config);
  AdapterModel ma = a.model, mb = b.model;
  CHECK(adapters_equal(ma, mb));

  REQUIRE(a.log.epochs.size() == 30);
  CHECK(a.log.epochs.back().terms.total < a.log.epochs.front().terms.total);
}

TEST_CASE("input validation") {
  const SurrogateStack stack = make_surrogate(11);
  const std::vector<double> wrong(100, 0.0);
  CHECK_THROWS_AS(surrogate_forward(stack, wrong), ValidationError);
}

}  // TEST_SUITE
