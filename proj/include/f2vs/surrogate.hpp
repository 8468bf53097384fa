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

#ifndef F2VS_SURROGATE_HPP
#define F2VS_SURROGATE_HPP

#include <cstdint>

#include "f2vs/losses.hpp"

namespace f2vs {

inline constexpr std::size_t kAudioDim = 256;
inline constexpr std::size_t kVecDim = 128;

// Frozen random stand-ins for the downstream synthesis chain: a voicing
// map (identity embedding -> audio features), a speaker encoder, and a
// speech-feature encoder. Regenerated bit-identically from the seed.
struct SurrogateStack {
  std::uint64_t seed = 0;
  Mat tts_map;                   // 256 x 192
  std::vector<double> tts_bias;  // 256
  Mat spk_map;                   // 192 x 256
  Mat vec_map;                   // 128 x 256
};

SurrogateStack make_surrogate(std::uint64_t seed);

struct SurrogateOut {
  std::vector<double> audio;  // 256, tanh(tts_map s + bias)
  std::vector<double> spk;    // 192, spk_map audio
  std::vector<double> vec;    // 128, vec_map audio
};

SurrogateOut surrogate_forward(const SurrogateStack& stack,
                               std::span<const double> s);

struct Stage2Config {
  double lambda_tts = 1.0;
  double lambda_vec = 1.0;
  std::size_t batch_size = 32;
  double learning_rate = 5e-5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  std::uint64_t surrogate_seed = 0;
};

struct Stage2Noise {
  Mat eta;  // batch x latent_dim
};

Stage2Noise draw_stage2_noise(std::size_t batch, std::size_t latent_dim,
                              RandomSource& rng);

// total = l_tts * (1 - cos(spk_pred, spk_target))
//       + l_vec * mean squared (vec_pred - vec_target),
// both surrogate paths driven by s_pred = decode(sample(encode(v))) on
// one side and s_target on the other. Gradients reach the adapter only.
GradientBundle loss_stage2(const AdapterModel& model,
                           const SurrogateStack& stack, const BatchView& batch,
                           const Stage2Config& config,
                           const Stage2Noise& noise);

LossTerms loss_stage2_value(const AdapterModel& model,
                            const SurrogateStack& stack,
                            const BatchView& batch,
                            const Stage2Config& config,
                            const Stage2Noise& noise);

}  // namespace f2vs

#endif  // F2VS_SURROGATE_HPP
