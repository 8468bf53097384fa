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

#include "f2vs/surrogate.hpp"

#include <cmath>

#include "f2vs/embedding.hpp"
#include "f2vs/linalg.hpp"

namespace f2vs {
namespace {

struct Stage2Forward {
  Mat h, mu, lv_raw, lv, z, g, s;  // adapter caches, as in stage 1
  Mat audio_pred;                  // batch x 256 (post-tanh)
  Mat spk_pred;                    // batch x 192
  Mat vec_pred;                    // batch x 128
  Mat spk_tgt;                     // batch x 192
  Mat vec_tgt;                     // batch x 128
  LossTerms terms;
};

void check_batch2(const AdapterModel& model, const BatchView& batch,
                  const Stage2Noise& noise) {
  const std::size_t b = batch.faces.rows;
  require(b >= 1, "loss_stage2: empty batch");
  require(batch.faces.cols == kFaceDim, "loss_stage2: faces must be 512-d");
  require(batch.targets.rows == b && batch.targets.cols == kVoiceDim,
          "loss_stage2: targets must be batch x 192");
  require(noise.eta.rows == b && noise.eta.cols == model.latent_dim,
          "loss_stage2: eta shape mismatch");
}

Stage2Forward stage2_forward(const AdapterModel& model,
                             const SurrogateStack& stack,
                             const BatchView& batch,
                             const Stage2Config& config,
                             const Stage2Noise& noise) {
  check_batch2(model, batch, noise);
  const std::size_t b = batch.faces.rows;
  const std::size_t L = model.latent_dim;

  Stage2Forward f;
  f.h = Mat(b, kHiddenDim);
  f.mu = Mat(b, L);
  f.lv_raw = Mat(b, L);
  f.lv = Mat(b, L);
  f.z = Mat(b, L);
  f.g = Mat(b, kHiddenDim);
  f.s = Mat(b, kVoiceDim);
  f.audio_pred = Mat(b, kAudioDim);
  f.spk_pred = Mat(b, kVoiceDim);
  f.vec_pred = Mat(b, kVecDim);
  f.spk_tgt = Mat(b, kVoiceDim);
  f.vec_tgt = Mat(b, kVecDim);

  for (std::size_t n = 0; n < b; ++n) {
    const EncodeResult enc = encode(model, batch.faces.row_span(n));
    std::copy(enc.h.begin(), enc.h.end(), f.h.row(n));
    std::copy(enc.mu.begin(), enc.mu.end(), f.mu.row(n));
    std::copy(enc.logvar_raw.begin(), enc.logvar_raw.end(), f.lv_raw.row(n));
    std::copy(enc.logvar.begin(), enc.logvar.end(), f.lv.row(n));
    double* z = f.z.row(n);
    const double* eta = noise.eta.row(n);
    for (std::size_t i = 0; i < L; ++i) {
      z[i] = enc.mu[i] + std::exp(0.5 * enc.logvar[i]) * eta[i];
    }
    const DecodeResult dec = decode(model, f.z.row_span(n));
    std::copy(dec.g.begin(), dec.g.end(), f.g.row(n));
    std::copy(dec.s.begin(), dec.s.end(), f.s.row(n));

    const SurrogateOut pred = surrogate_forward(stack, f.s.row_span(n));
    std::copy(pred.audio.begin(), pred.audio.end(), f.audio_pred.row(n));
    std::copy(pred.spk.begin(), pred.spk.end(), f.spk_pred.row(n));
    std::copy(pred.vec.begin(), pred.vec.end(), f.vec_pred.row(n));
    const SurrogateOut tgt =
        surrogate_forward(stack, batch.targets.row_span(n));
    std::copy(tgt.spk.begin(), tgt.spk.end(), f.spk_tgt.row(n));
    std::copy(tgt.vec.begin(), tgt.vec.end(), f.vec_tgt.row(n));
  }

  if (config.lambda_tts != 0.0) {
    double acc = 0.0;
    for (std::size_t n = 0; n < b; ++n) {
      acc += 1.0 - cosine_similarity(f.spk_pred.row_span(n),
                                     f.spk_tgt.row_span(n));
    }
    f.terms.tts = acc / static_cast<double>(b);
  }
  if (config.lambda_vec != 0.0) {
    double acc = 0.0;
    for (std::size_t n = 0; n < b; ++n) {
      const double* p = f.vec_pred.row(n);
      const double* t = f.vec_tgt.row(n);
      double sq = 0.0;
      for (std::size_t i = 0; i < kVecDim; ++i) {
        const double diff = p[i] - t[i];
        sq += diff * diff;
      }
      acc += sq / static_cast<double>(kVecDim);
    }
    f.terms.vec = acc / static_cast<double>(b);
  }
  f.terms.total =
      config.lambda_tts * f.terms.tts + config.lambda_vec * f.terms.vec;
  return f;
}

}  // namespace

SurrogateStack make_surrogate(std::uint64_t seed) {
  RandomSource rng(seed);
  SurrogateStack stack;
  stack.seed = seed;
  stack.tts_map = Mat(kAudioDim, kVoiceDim);
  stack.tts_bias.assign(kAudioDim, 0.0);
  stack.spk_map = Mat(kVoiceDim, kAudioDim);
  stack.vec_map = Mat(kVecDim, kAudioDim);
  const double s_tts = 1.0 / std::sqrt(double(kVoiceDim));
  const double s_aud = 1.0 / std::sqrt(double(kAudioDim));
  for (double& v : stack.tts_map.a) v = s_tts * rng.gaussian();
  for (double& v : stack.tts_bias) v = 0.1 * rng.gaussian();
  for (double& v : stack.spk_map.a) v = s_aud * rng.gaussian();
  for (double& v : stack.vec_map.a) v = s_aud * rng.gaussian();
  return stack;
}

SurrogateOut surrogate_forward(const SurrogateStack& stack,
                               std::span<const double> s) {
  require(s.size() == kVoiceDim,
          "surrogate_forward: input must be 192-dimensional");
  SurrogateOut out;
  out.audio = la::matvec(stack.tts_map, s);
  for (std::size_t i = 0; i < kAudioDim; ++i) {
    out.audio[i] = std::tanh(out.audio[i] + stack.tts_bias[i]);
  }
  out.spk = la::matvec(stack.spk_map, out.audio);
  out.vec = la::matvec(stack.vec_map, out.audio);
  return out;
}

Stage2Noise draw_stage2_noise(std::size_t batch, std::size_t latent_dim,
                              RandomSource& rng) {
  Stage2Noise noise;
  noise.eta = Mat(batch, latent_dim);
  for (double& v : noise.eta.a) v = rng.gaussian();
  return noise;
}

LossTerms loss_stage2_value(const AdapterModel& model,
                            const SurrogateStack& stack,
                            const BatchView& batch,
                            const Stage2Config& config,
                            const Stage2Noise& noise) {
  return stage2_forward(model, stack, batch, config, noise).terms;
}

GradientBundle loss_stage2(const AdapterModel& model,
                           const SurrogateStack& stack, const BatchView& batch,
                           const Stage2Config& config,
                           const Stage2Noise& noise) {
  Stage2Forward f = stage2_forward(model, stack, batch, config, noise);
  const std::size_t b = batch.faces.rows;
  const std::size_t L = model.latent_dim;

  GradientBundle out;
  out.grad = adapter_zeros(L);

  // d total / d s_pred through the frozen surrogate stack.
  Mat ds(b, kVoiceDim);
  std::vector<double> dspk(kVoiceDim), dvec(kVecDim), daf(kAudioDim),
      da(kAudioDim);
  for (std::size_t n = 0; n < b; ++n) {
    std::fill(dspk.begin(), dspk.end(), 0.0);
    std::fill(dvec.begin(), dvec.end(), 0.0);
    if (config.lambda_tts != 0.0) {
      const auto p = f.spk_pred.row_span(n);
      const auto t = f.spk_tgt.row_span(n);
      const double np = la::norm(p);
      const double nt = la::norm(t);
      const double c = cosine_similarity(p, t);
      const double w = config.lambda_tts / static_cast<double>(b);
      for (std::size_t i = 0; i < kVoiceDim; ++i) {
        dspk[i] = w * (c * p[i] / (np * np) - t[i] / (np * nt));
      }
    }
    if (config.lambda_vec != 0.0) {
      const double* p = f.vec_pred.row(n);
      const double* t = f.vec_tgt.row(n);
      const double w = 2.0 * config.lambda_vec /
                       (static_cast<double>(b) * static_cast<double>(kVecDim));
      for (std::size_t i = 0; i < kVecDim; ++i) dvec[i] = w * (p[i] - t[i]);
    }
    daf = la::matvec_t(stack.spk_map, dspk);
    const auto daf_vec = la::matvec_t(stack.vec_map, dvec);
    const double* af = f.audio_pred.row(n);
    for (std::size_t i = 0; i < kAudioDim; ++i) {
      da[i] = (daf[i] + daf_vec[i]) * (1.0 - af[i] * af[i]);
    }
    const auto ds_n = la::matvec_t(stack.tts_map, da);
    std::copy(ds_n.begin(), ds_n.end(), ds.row(n));
  }

  // Adapter backward, identical shape to the stage-1 pass.
  std::vector<double> dg(kHiddenDim), dad(kHiddenDim), dh(kHiddenDim),
      dpre(kHiddenDim);
  std::vector<double> dmu(L), dlv(L);
  for (std::size_t n = 0; n < b; ++n) {
    const auto ds_n = ds.row_span(n);
    la::axpy(1.0, ds_n, out.grad.dec_b2);
    la::add_outer(out.grad.dec_w2, ds_n, f.g.row_span(n));
    dg = la::matvec_t(model.dec_w2, ds_n);
    const double* g = f.g.row(n);
    for (std::size_t i = 0; i < kHiddenDim; ++i) {
      dad[i] = dg[i] * (1.0 - g[i] * g[i]);
    }
    la::axpy(1.0, dad, out.grad.dec_b1);
    la::add_outer(out.grad.dec_w1, dad, f.z.row_span(n));
    const auto dz = la::matvec_t(model.dec_w1, dad);

    const double* eta = noise.eta.row(n);
    const double* lv = f.lv.row(n);
    const double* lv_raw = f.lv_raw.row(n);
    for (std::size_t i = 0; i < L; ++i) {
      dmu[i] = dz[i];
      const bool inside = std::abs(lv_raw[i]) <= kLogvarClamp;
      dlv[i] = inside ? dz[i] * eta[i] * 0.5 * std::exp(0.5 * lv[i]) : 0.0;
    }
    la::axpy(1.0, dmu, out.grad.enc_b_mu);
    la::add_outer(out.grad.enc_w_mu, dmu, f.h.row_span(n));
    la::axpy(1.0, dlv, out.grad.enc_b_lv);
    la::add_outer(out.grad.enc_w_lv, dlv, f.h.row_span(n));
    dh = la::matvec_t(model.enc_w_mu, dmu);
    const auto dh_lv = la::matvec_t(model.enc_w_lv, dlv);
    const double* h = f.h.row(n);
    for (std::size_t i = 0; i < kHiddenDim; ++i) {
      dpre[i] = (dh[i] + dh_lv[i]) * (1.0 - h[i] * h[i]);
    }
    la::axpy(1.0, dpre, out.grad.enc_b1);
    la::add_outer(out.grad.enc_w1, dpre, batch.faces.row_span(n));
  }

  out.terms = f.terms;
  out.s_pred = std::move(f.s);
  return out;
}

}  // namespace f2vs
