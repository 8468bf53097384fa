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

#include "f2vs/losses.hpp"

#include <cmath>

#include "f2vs/embedding.hpp"
#include "f2vs/linalg.hpp"
#include "f2vs/mmd.hpp"

namespace f2vs {
namespace {

// Intermediate activations for one batch, kept for the backward pass.
struct Stage1Forward {
  Mat h;       // batch x 256
  Mat mu;      // batch x L
  Mat lv_raw;  // batch x L
  Mat lv;      // batch x L
  Mat z;       // batch x L
  Mat g;       // batch x 256
  Mat s;       // batch x 192
  double sigma = 0.0;  // mmd bandwidth actually used
  LossTerms terms;
};

void check_batch(const AdapterModel& model, const BatchView& batch,
                 const Stage1Noise& noise) {
  const std::size_t b = batch.faces.rows;
  require(b >= 1, "loss_stage1: empty batch");
  require(batch.faces.cols == kFaceDim, "loss_stage1: faces must be 512-d");
  require(batch.targets.rows == b && batch.targets.cols == kVoiceDim,
          "loss_stage1: targets must be batch x 192");
  require(batch.labels.size() == b, "loss_stage1: labels size mismatch");
  require(noise.eta.rows == b && noise.eta.cols == model.latent_dim,
          "loss_stage1: eta shape mismatch");
  require(noise.prior.rows == b && noise.prior.cols == model.latent_dim,
          "loss_stage1: prior shape mismatch");
}

// Computes every term whose lambda is nonzero; a disabled term stays 0 and
// its inputs are never touched, so lambda = 0 configurations cannot fail
// on degenerate geometry they do not use.
Stage1Forward stage1_forward(const AdapterModel& model, const BatchView& batch,
                             const CenterBank& bank,
                             const Stage1Config& config,
                             const Stage1Noise& noise, bool with_mmd_value) {
  check_batch(model, batch, noise);
  const std::size_t b = batch.faces.rows;
  const std::size_t L = model.latent_dim;

  Stage1Forward f;
  f.h = Mat(b, kHiddenDim);
  f.mu = Mat(b, L);
  f.lv_raw = Mat(b, L);
  f.lv = Mat(b, L);
  f.z = Mat(b, L);
  f.g = Mat(b, kHiddenDim);
  f.s = Mat(b, kVoiceDim);

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
  }

  if (config.lambda_rec != 0.0) {
    double acc = 0.0;
    for (std::size_t n = 0; n < b; ++n) {
      acc += loss_rec(f.s.row_span(n), batch.targets.row_span(n));
    }
    f.terms.rec = acc / static_cast<double>(b);
  }
  if (config.lambda_con != 0.0 && b >= 2) {
    f.terms.con = loss_con(f.s, batch.labels, config.margin);
  }
  if (config.lambda_cen != 0.0) {
    f.terms.cen = loss_cen(f.s, batch.labels, bank);
  }
  if (config.lambda_mmd != 0.0 && with_mmd_value) {
    f.sigma = noise.fixed_bandwidth > 0.0
                  ? noise.fixed_bandwidth
                  : median_heuristic_bandwidth(f.z, noise.prior);
    f.terms.mmd = mmd2_biased(f.z, noise.prior, f.sigma);
  }
  f.terms.total = config.lambda_rec * f.terms.rec +
                  config.lambda_con * f.terms.con +
                  config.lambda_cen * f.terms.cen +
                  config.lambda_mmd * f.terms.mmd;
  return f;
}

}  // namespace

CenterBank make_center_bank(std::size_t num_classes, double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0,
          "center bank: alpha must be in [0, 1]");
  CenterBank bank;
  bank.alpha = alpha;
  bank.centers = Mat(num_classes, kVoiceDim);
  bank.initialized.assign(num_classes, false);
  return bank;
}

void update_centers(CenterBank& bank, const Mat& s_batch,
                    std::span<const std::uint32_t> labels) {
  require(s_batch.rows == labels.size(), "update_centers: size mismatch");
  require(s_batch.cols == bank.centers.cols,
          "update_centers: dimension mismatch");
  for (std::size_t n = 0; n < s_batch.rows; ++n) {
    const std::uint32_t y = labels[n];
    require(y < bank.centers.rows, "update_centers: label out of range");
    const double* s = s_batch.row(n);
    double* c = bank.centers.row(y);
    if (!bank.initialized[y]) {
      for (std::size_t i = 0; i < s_batch.cols; ++i) c[i] = s[i];
      bank.initialized[y] = true;
    } else {
      for (std::size_t i = 0; i < s_batch.cols; ++i) {
        c[i] = bank.alpha * s[i] + (1.0 - bank.alpha) * c[i];
      }
    }
  }
}

double loss_rec(std::span<const double> s_pred,
                std::span<const double> s_target) {
  return 1.0 - cosine_similarity(s_pred, s_target);
}

double loss_con(const Mat& s_batch, std::span<const std::uint32_t> labels,
                double margin) {
  const std::size_t b = s_batch.rows;
  require(b >= 2, "loss_con: batch must have at least 2 samples");
  require(labels.size() == b, "loss_con: labels size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = i + 1; j < b; ++j) {
      const double c =
          cosine_similarity(s_batch.row_span(i), s_batch.row_span(j));
      if (labels[i] == labels[j]) {
        acc += 1.0 - c;
      } else {
        acc += std::max(0.0, c - margin);
      }
    }
  }
  return acc / (0.5 * static_cast<double>(b) * static_cast<double>(b - 1));
}

double loss_cen(const Mat& s_batch, std::span<const std::uint32_t> labels,
                const CenterBank& bank) {
  require(labels.size() == s_batch.rows, "loss_cen: labels size mismatch");
  require(s_batch.cols == bank.centers.cols, "loss_cen: dimension mismatch");
  double acc = 0.0;
  for (std::size_t n = 0; n < s_batch.rows; ++n) {
    const std::uint32_t y = labels[n];
    require(y < bank.centers.rows && bank.initialized[y],
            "loss_cen: missing center for a batch label");
    const double* s = s_batch.row(n);
    const double* c = bank.centers.row(y);
    for (std::size_t i = 0; i < s_batch.cols; ++i) {
      const double diff = s[i] - c[i];
      acc += diff * diff;
    }
  }
  return 0.5 * acc;
}

Stage1Noise draw_stage1_noise(std::size_t batch, std::size_t latent_dim,
                              RandomSource& rng) {
  Stage1Noise noise;
  noise.eta = Mat(batch, latent_dim);
  noise.prior = Mat(batch, latent_dim);
  for (double& v : noise.eta.a) v = rng.gaussian();
  for (double& v : noise.prior.a) v = rng.gaussian();
  return noise;
}

LossTerms loss_stage1_value(const AdapterModel& model, const BatchView& batch,
                            const CenterBank& bank,
                            const Stage1Config& config,
                            const Stage1Noise& noise) {
  return stage1_forward(model, batch, bank, config, noise, true).terms;
}

GradientBundle loss_stage1(const AdapterModel& model, const BatchView& batch,
                           const CenterBank& bank, const Stage1Config& config,
                           const Stage1Noise& noise) {
  // MMD value and gradient come from the same call below.
  Stage1Forward f =
      stage1_forward(model, batch, bank, config, noise, false);
  const std::size_t b = batch.faces.rows;
  const std::size_t L = model.latent_dim;

  GradientBundle out;
  out.grad = adapter_zeros(L);

  Mat dz(b, L);
  if (config.lambda_mmd != 0.0) {
    f.sigma = noise.fixed_bandwidth > 0.0
                  ? noise.fixed_bandwidth
                  : median_heuristic_bandwidth(f.z, noise.prior);
    Mat mmd_grad;
    f.terms.mmd = mmd2_biased_with_grad(f.z, noise.prior, f.sigma, &mmd_grad);
    f.terms.total += config.lambda_mmd * f.terms.mmd;
    for (std::size_t i = 0; i < dz.a.size(); ++i) {
      dz.a[i] = config.lambda_mmd * mmd_grad.a[i];
    }
  }

  // d total / d s, accumulated per term.
  Mat ds(b, kVoiceDim);
  std::vector<double> snorm(b);
  for (std::size_t n = 0; n < b; ++n) snorm[n] = la::norm(f.s.row_span(n));

  if (config.lambda_rec != 0.0) {
    const double w = config.lambda_rec / static_cast<double>(b);
    for (std::size_t n = 0; n < b; ++n) {
      const double* s = f.s.row(n);
      const auto t = batch.targets.row_span(n);
      const double ns = snorm[n];
      const double nt = la::norm(t);
      const double c = cosine_similarity(f.s.row_span(n), t);
      double* d = ds.row(n);
      for (std::size_t i = 0; i < kVoiceDim; ++i) {
        d[i] += w * (c * s[i] / (ns * ns) - t[i] / (ns * nt));
      }
    }
  }
  if (config.lambda_con != 0.0 && b >= 2) {
    const double w = config.lambda_con /
                     (0.5 * static_cast<double>(b) * static_cast<double>(b - 1));
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t j = i + 1; j < b; ++j) {
        const double* si = f.s.row(i);
        const double* sj = f.s.row(j);
        const double ni = snorm[i];
        const double nj = snorm[j];
        const double c =
            cosine_similarity(f.s.row_span(i), f.s.row_span(j));
        // sign: same-label pairs push cosine up, hinge pairs push it down.
        double sgn = 0.0;
        if (batch.labels[i] == batch.labels[j]) {
          sgn = -1.0;
        } else if (c > config.margin) {
          sgn = 1.0;
        } else {
          continue;
        }
        double* di = ds.row(i);
        double* dj = ds.row(j);
        for (std::size_t t = 0; t < kVoiceDim; ++t) {
          di[t] += w * sgn * (sj[t] / (ni * nj) - c * si[t] / (ni * ni));
          dj[t] += w * sgn * (si[t] / (ni * nj) - c * sj[t] / (nj * nj));
        }
      }
    }
  }
  if (config.lambda_cen != 0.0) {
    for (std::size_t n = 0; n < b; ++n) {
      const double* s = f.s.row(n);
      const double* c = bank.centers.row(batch.labels[n]);
      double* d = ds.row(n);
      for (std::size_t i = 0; i < kVoiceDim; ++i) {
        d[i] += config.lambda_cen * (s[i] - c[i]);
      }
    }
  }

  // Backward pass, one sample at a time in batch order.
  std::vector<double> dg(kHiddenDim), da(kHiddenDim), dh(kHiddenDim),
      dpre(kHiddenDim);
  std::vector<double> dmu(L), dlv(L);
  for (std::size_t n = 0; n < b; ++n) {
    const auto ds_n = ds.row_span(n);
    la::axpy(1.0, ds_n, out.grad.dec_b2);
    la::add_outer(out.grad.dec_w2, ds_n, f.g.row_span(n));
    dg = la::matvec_t(model.dec_w2, ds_n);
    const double* g = f.g.row(n);
    for (std::size_t i = 0; i < kHiddenDim; ++i) {
      da[i] = dg[i] * (1.0 - g[i] * g[i]);
    }
    la::axpy(1.0, da, out.grad.dec_b1);
    la::add_outer(out.grad.dec_w1, da, f.z.row_span(n));
    const auto dz_dec = la::matvec_t(model.dec_w1, da);

    const double* eta = noise.eta.row(n);
    const double* lv = f.lv.row(n);
    const double* lv_raw = f.lv_raw.row(n);
    double* dz_n = dz.row(n);
    for (std::size_t i = 0; i < L; ++i) {
      dz_n[i] += dz_dec[i];
      dmu[i] = dz_n[i];
      const bool inside = std::abs(lv_raw[i]) <= kLogvarClamp;
      dlv[i] = inside ? dz_n[i] * eta[i] * 0.5 * std::exp(0.5 * lv[i]) : 0.0;
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
