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

#ifndef F2VS_ADAPTER_HPP
#define F2VS_ADAPTER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "f2vs/common.hpp"
#include "f2vs/random.hpp"

namespace f2vs {

inline constexpr std::size_t kFaceDim = 512;
inline constexpr std::size_t kVoiceDim = 192;
inline constexpr std::size_t kHiddenDim = 256;
inline constexpr double kLogvarClamp = 10.0;

// VAE mapping a 512-d face embedding to a 192-d identity embedding.
// Encoder: 512 -> tanh(256) -> (mu, logvar) in latent_dim.
// Decoder: latent_dim -> tanh(256) -> 192.
struct AdapterModel {
  std::size_t latent_dim = 64;
  Mat enc_w1;                   // 256 x 512
  std::vector<double> enc_b1;   // 256
  Mat enc_w_mu;                 // L x 256
  std::vector<double> enc_b_mu; // L
  Mat enc_w_lv;                 // L x 256
  std::vector<double> enc_b_lv; // L
  Mat dec_w1;                   // 256 x L
  std::vector<double> dec_b1;   // 256
  Mat dec_w2;                   // 192 x 256
  std::vector<double> dec_b2;   // 192
};

// Named view over the parameter blocks in declaration order; shared by
// the optimizer, the checkpoint format, and the gradient checker.
struct ParamBlock {
  const char* name;
  double* data;
  std::size_t size;
};
std::vector<ParamBlock> param_blocks(AdapterModel& model);
std::size_t param_count(const AdapterModel& model);

// All-zero parameter tensors with the given latent size.
AdapterModel adapter_zeros(std::size_t latent_dim);

// Random init: weight std 1/sqrt(fan_in), biases 0 except enc_b_lv = -4
// (training starts with a narrow posterior so early reconstruction
// gradients are not drowned in sampling noise).
AdapterModel adapter_init(std::size_t latent_dim, RandomSource& rng);

struct EncodeResult {
  std::vector<double> h;       // 256, post-tanh
  std::vector<double> mu;      // L
  std::vector<double> logvar;  // L, clamped to [-10, 10]
  std::vector<double> logvar_raw;  // pre-clamp (gradient mask)
};
EncodeResult encode(const AdapterModel& model, std::span<const double> v);

// z = mu + exp(0.5 logvar) * eta, eta drawn from rng.
std::vector<double> sample_latent(std::span<const double> mu,
                                  std::span<const double> logvar,
                                  RandomSource& rng);

struct DecodeResult {
  std::vector<double> g;  // 256, post-tanh
  std::vector<double> s;  // 192
};
DecodeResult decode(const AdapterModel& model, std::span<const double> z);

// Full forward with z = mu (the deterministic variant).
std::vector<double> adapter_forward_mean(const AdapterModel& model,
                                         std::span<const double> v);

// Checkpoint: magic "F2VS", u32 version, u32 latent_dim, then each block
// in declaration order as u32 element count + float64 little-endian data.
void save_adapter(const AdapterModel& model, const std::string& path);
AdapterModel load_adapter(const std::string& path);

}  // namespace f2vs

#endif  // F2VS_ADAPTER_HPP
