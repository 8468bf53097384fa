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

#ifndef F2VS_LOSSES_HPP
#define F2VS_LOSSES_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "f2vs/adapter.hpp"
#include "f2vs/common.hpp"
#include "f2vs/random.hpp"

namespace f2vs {

// Per-class running means of predicted identity embeddings, updated by an
// exponential moving average outside the gradient flow.
struct CenterBank {
  double alpha = 0.5;
  Mat centers;  // num_classes x 192
  std::vector<bool> initialized;
};

CenterBank make_center_bank(std::size_t num_classes, double alpha);

// c_y <- alpha * s + (1 - alpha) * c_y, applied in batch order; an
// uninitialized center adopts the first observed s for its label.
void update_centers(CenterBank& bank, const Mat& s_batch,
                    std::span<const std::uint32_t> labels);

// 1 - cos(s_pred, s_target).
double loss_rec(std::span<const double> s_pred,
                std::span<const double> s_target);

// Mean over unordered pairs: same label -> 1 - cos; different label ->
// max(0, cos - margin).
double loss_con(const Mat& s_batch, std::span<const std::uint32_t> labels,
                double margin);

// (1/2) sum_n ||s_n - c_{y_n}||^2 (plain sum over the batch).
double loss_cen(const Mat& s_batch, std::span<const std::uint32_t> labels,
                const CenterBank& bank);

struct Stage1Config {
  double lambda_rec = 1.0;
  double lambda_con = 0.5;
  double lambda_cen = 0.01;
  double lambda_mmd = 1.0;
  double margin = 0.2;
  double center_alpha = 0.5;
  std::size_t batch_size = 32;
  double learning_rate = 5e-5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t epochs = 200;
  std::size_t latent_dim = 64;
  std::uint64_t seed = 0;
};

// Raw (unweighted) loss terms; total carries the lambda weights.
struct LossTerms {
  double total = 0.0;
  double rec = 0.0;
  double con = 0.0;
  double cen = 0.0;
  double mmd = 0.0;
  double tts = 0.0;
  double vec = 0.0;
};

// Gradients shaped exactly like the model, plus the forward outputs the
// training loop needs (losses and the predicted embeddings for the
// detached center update).
struct GradientBundle {
  AdapterModel grad;
  LossTerms terms;
  Mat s_pred;  // batch x 192
};

struct BatchView {
  const Mat& faces;    // batch x 512
  const Mat& targets;  // batch x 192
  std::span<const std::uint32_t> labels;
};

// Randomness for one loss evaluation, drawn once and reused so replays
// and finite-difference probes see the exact same noise.
struct Stage1Noise {
  Mat eta;    // batch x latent_dim
  Mat prior;  // batch x latent_dim
  // 0 means "median heuristic on the live batch". The gradient treats the
  // bandwidth as a constant either way; the checker pins it so finite
  // differences see the same constant.
  double fixed_bandwidth = 0.0;
};

Stage1Noise draw_stage1_noise(std::size_t batch, std::size_t latent_dim,
                              RandomSource& rng);

// total = l_rec*rec + l_con*con + l_cen*cen + l_mmd*mmd2(z_batch, prior).
// Analytic backprop through decode(sample(encode(v))); centers constant.
GradientBundle loss_stage1(const AdapterModel& model, const BatchView& batch,
                           const CenterBank& bank, const Stage1Config& config,
                           const Stage1Noise& noise);

// Forward-only evaluation (finite-difference probes).
LossTerms loss_stage1_value(const AdapterModel& model, const BatchView& batch,
                            const CenterBank& bank,
                            const Stage1Config& config,
                            const Stage1Noise& noise);

}  // namespace f2vs

#endif  // F2VS_LOSSES_HPP
