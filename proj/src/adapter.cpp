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

#include "f2vs/adapter.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "f2vs/linalg.hpp"

namespace f2vs {
namespace {

constexpr char kMagic[4] = {'F', '2', 'V', 'S'};
constexpr std::uint32_t kVersion = 1;

void fill_gaussian(double* data, std::size_t size, double std,
                   RandomSource& rng) {
  for (std::size_t i = 0; i < size; ++i) data[i] = std * rng.gaussian();
}

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw ValidationError("checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ofstream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) {
    b[i] = static_cast<unsigned char>(bits >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::ifstream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw ValidationError("checkpoint: truncated file");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  }
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

std::vector<ParamBlock> param_blocks(AdapterModel& m) {
  return {
      {"enc_w1", m.enc_w1.a.data(), m.enc_w1.a.size()},
      {"enc_b1", m.enc_b1.data(), m.enc_b1.size()},
      {"enc_w_mu", m.enc_w_mu.a.data(), m.enc_w_mu.a.size()},
      {"enc_b_mu", m.enc_b_mu.data(), m.enc_b_mu.size()},
      {"enc_w_lv", m.enc_w_lv.a.data(), m.enc_w_lv.a.size()},
      {"enc_b_lv", m.enc_b_lv.data(), m.enc_b_lv.size()},
      {"dec_w1", m.dec_w1.a.data(), m.dec_w1.a.size()},
      {"dec_b1", m.dec_b1.data(), m.dec_b1.size()},
      {"dec_w2", m.dec_w2.a.data(), m.dec_w2.a.size()},
      {"dec_b2", m.dec_b2.data(), m.dec_b2.size()},
  };
}

std::size_t param_count(const AdapterModel& model) {
  std::size_t total = 0;
  for (const auto& b : param_blocks(const_cast<AdapterModel&>(model))) {
    total += b.size;
  }
  return total;
}

AdapterModel adapter_zeros(std::size_t latent_dim) {
  require(latent_dim >= 1, "adapter: latent_dim must be positive");
  AdapterModel m;
  m.latent_dim = latent_dim;
  m.enc_w1 = Mat(kHiddenDim, kFaceDim);
  m.enc_b1.assign(kHiddenDim, 0.0);
  m.enc_w_mu = Mat(latent_dim, kHiddenDim);
  m.enc_b_mu.assign(latent_dim, 0.0);
  m.enc_w_lv = Mat(latent_dim, kHiddenDim);
  m.enc_b_lv.assign(latent_dim, 0.0);
  m.dec_w1 = Mat(kHiddenDim, latent_dim);
  m.dec_b1.assign(kHiddenDim, 0.0);
  m.dec_w2 = Mat(kVoiceDim, kHiddenDim);
  m.dec_b2.assign(kVoiceDim, 0.0);
  return m;
}

AdapterModel adapter_init(std::size_t latent_dim, RandomSource& rng) {
  AdapterModel m = adapter_zeros(latent_dim);
  fill_gaussian(m.enc_w1.a.data(), m.enc_w1.a.size(),
                1.0 / std::sqrt(double(kFaceDim)), rng);
  fill_gaussian(m.enc_w_mu.a.data(), m.enc_w_mu.a.size(),
                1.0 / std::sqrt(double(kHiddenDim)), rng);
  fill_gaussian(m.enc_w_lv.a.data(), m.enc_w_lv.a.size(),
                1.0 / std::sqrt(double(kHiddenDim)), rng);
  fill_gaussian(m.dec_w1.a.data(), m.dec_w1.a.size(),
                1.0 / std::sqrt(double(latent_dim)), rng);
  fill_gaussian(m.dec_w2.a.data(), m.dec_w2.a.size(),
                1.0 / std::sqrt(double(kHiddenDim)), rng);
  std::fill(m.enc_b_lv.begin(), m.enc_b_lv.end(), -4.0);
  return m;
}

EncodeResult encode(const AdapterModel& model, std::span<const double> v) {
  require(v.size() == kFaceDim, "encode: input must be 512-dimensional");
  EncodeResult r;
  r.h = la::matvec(model.enc_w1, v);
  for (std::size_t i = 0; i < r.h.size(); ++i) {
    r.h[i] = std::tanh(r.h[i] + model.enc_b1[i]);
  }
  r.mu = la::matvec(model.enc_w_mu, r.h);
  for (std::size_t i = 0; i < r.mu.size(); ++i) r.mu[i] += model.enc_b_mu[i];
  r.logvar_raw = la::matvec(model.enc_w_lv, r.h);
  r.logvar.resize(r.logvar_raw.size());
  for (std::size_t i = 0; i < r.logvar_raw.size(); ++i) {
    r.logvar_raw[i] += model.enc_b_lv[i];
    r.logvar[i] = std::clamp(r.logvar_raw[i], -kLogvarClamp, kLogvarClamp);
  }
  return r;
}

std::vector<double> sample_latent(std::span<const double> mu,
                                  std::span<const double> logvar,
                                  RandomSource& rng) {
  require(mu.size() == logvar.size(), "sample_latent: size mismatch");
  std::vector<double> z(mu.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = mu[i] + std::exp(0.5 * logvar[i]) * rng.gaussian();
  }
  return z;
}

DecodeResult decode(const AdapterModel& model, std::span<const double> z) {
  require(z.size() == model.latent_dim,
          "decode: input must match latent_dim");
  DecodeResult r;
  r.g = la::matvec(model.dec_w1, z);
  for (std::size_t i = 0; i < r.g.size(); ++i) {
    r.g[i] = std::tanh(r.g[i] + model.dec_b1[i]);
  }
  r.s = la::matvec(model.dec_w2, r.g);
  for (std::size_t i = 0; i < r.s.size(); ++i) r.s[i] += model.dec_b2[i];
  return r;
}

std::vector<double> adapter_forward_mean(const AdapterModel& model,
                                         std::span<const double> v) {
  const EncodeResult enc = encode(model, v);
  return decode(model, enc.mu).s;
}

void save_adapter(const AdapterModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("checkpoint: cannot open for write: " + path);
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(model.latent_dim));
  for (const auto& b : param_blocks(const_cast<AdapterModel&>(model))) {
    put_u32(out, static_cast<std::uint32_t>(b.size));
    for (std::size_t i = 0; i < b.size; ++i) put_f64(out, b.data[i]);
  }
  out.flush();
  if (!out) throw ValidationError("checkpoint: write failed: " + path);
}

AdapterModel load_adapter(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("checkpoint: cannot open: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw ValidationError("checkpoint: bad magic");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kVersion) {
    throw ValidationError("checkpoint: unsupported version");
  }
  const std::uint32_t latent_dim = get_u32(in);
  require(latent_dim >= 1, "checkpoint: invalid latent_dim");
  AdapterModel m = adapter_zeros(latent_dim);
  for (const auto& b : param_blocks(m)) {
    const std::uint32_t stored = get_u32(in);
    if (stored != b.size) {
      throw ValidationError(std::string("checkpoint: block size mismatch in ") +
                            b.name);
    }
    for (std::size_t i = 0; i < b.size; ++i) {
      b.data[i] = get_f64(in);
      if (!std::isfinite(b.data[i])) {
        throw ValidationError(
            std::string("checkpoint: non-finite parameter in ") + b.name);
      }
    }
  }
  char extra;
  if (in.read(&extra, 1)) {
    throw ValidationError("checkpoint: trailing bytes");
  }
  return m;
}

}  // namespace f2vs
