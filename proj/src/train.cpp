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

#include "f2vs/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace f2vs {
namespace {

void append_csv_value(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.8f", v);
  out += buf;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, RandomSource& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

struct GatheredBatch {
  Mat faces;
  Mat targets;
  std::vector<std::uint32_t> labels;
};

GatheredBatch gather(const EmbeddingSet& faces, const EmbeddingSet& voices,
                     std::span<const std::size_t> idx) {
  GatheredBatch b;
  b.faces = Mat(idx.size(), faces.dim());
  b.targets = Mat(idx.size(), voices.dim());
  b.labels.resize(idx.size());
  for (std::size_t n = 0; n < idx.size(); ++n) {
    const auto fv = faces.vec(idx[n]);
    const auto tv = voices.vec(idx[n]);
    double* fr = b.faces.row(n);
    double* tr = b.targets.row(n);
    for (std::size_t j = 0; j < fv.size(); ++j) fr[j] = fv[j];
    for (std::size_t j = 0; j < tv.size(); ++j) tr[j] = tv[j];
    b.labels[n] = faces.label_id(idx[n]);
  }
  return b;
}

void accumulate_terms(LossTerms& acc, const LossTerms& t, double weight) {
  acc.total += weight * t.total;
  acc.rec += weight * t.rec;
  acc.con += weight * t.con;
  acc.cen += weight * t.cen;
  acc.mmd += weight * t.mmd;
  acc.tts += weight * t.tts;
  acc.vec += weight * t.vec;
}

}  // namespace

void validate_paired(const EmbeddingSet& faces, const EmbeddingSet& voices) {
  require(faces.dim() == kFaceDim, "paired data: faces must be 512-d");
  require(voices.dim() == kVoiceDim, "paired data: voices must be 192-d");
  require(faces.size() == voices.size(),
          "paired data: face and voice record counts differ");
  for (std::size_t i = 0; i < faces.size(); ++i) {
    if (faces.label_name(faces.label_id(i)) !=
        voices.label_name(voices.label_id(i))) {
      throw ValidationError(
          "paired data: label mismatch at record " + std::to_string(i));
    }
  }
}

std::string render_stage1_log(const TrainLog& log) {
  std::string out = "epoch,l_rec,l_con,l_cen,l_mmd,total\n";
  for (const auto& e : log.epochs) {
    out += std::to_string(e.epoch);
    for (double v : {e.terms.rec, e.terms.con, e.terms.cen, e.terms.mmd,
                     e.terms.total}) {
      out += ',';
      append_csv_value(out, v);
    }
    out += '\n';
  }
  return out;
}

std::string render_stage2_log(const TrainLog& log) {
  std::string out = "epoch,l_tts,l_vec,total\n";
  for (const auto& e : log.epochs) {
    out += std::to_string(e.epoch);
    for (double v : {e.terms.tts, e.terms.vec, e.terms.total}) {
      out += ',';
      append_csv_value(out, v);
    }
    out += '\n';
  }
  return out;
}

AdamState make_adam_state(const AdapterModel& model) {
  AdamState st;
  st.m.assign(param_count(model), 0.0);
  st.v.assign(param_count(model), 0.0);
  return st;
}

void adam_step(AdapterModel& model, const AdapterModel& grad, AdamState& state,
               double lr, double beta1, double beta2, double epsilon) {
  require(lr >= 0.0, "adam_step: learning rate must be non-negative");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  auto mblocks = param_blocks(model);
  auto gblocks = param_blocks(const_cast<AdapterModel&>(grad));
  std::size_t at = 0;
  for (std::size_t b = 0; b < mblocks.size(); ++b) {
    double* p = mblocks[b].data;
    const double* g = gblocks[b].data;
    for (std::size_t i = 0; i < mblocks[b].size; ++i, ++at) {
      state.m[at] = beta1 * state.m[at] + (1.0 - beta1) * g[i];
      state.v[at] = beta2 * state.v[at] + (1.0 - beta2) * g[i] * g[i];
      const double mhat = state.m[at] / bc1;
      const double vhat = state.v[at] / bc2;
      p[i] -= lr * mhat / (std::sqrt(vhat) + epsilon);
    }
  }
}

Stage1Result train_stage1(const EmbeddingSet& faces,
                          const EmbeddingSet& voices,
                          const Stage1Config& config) {
  validate_paired(faces, voices);
  require(config.batch_size >= 2, "train_stage1: batch_size must be >= 2");
  require(config.learning_rate >= 0.0,
          "train_stage1: learning rate must be non-negative");

  RandomSource root(config.seed);
  RandomSource rng_init = root.split(1);
  RandomSource rng_order = root.split(2);
  RandomSource rng_noise = root.split(3);

  Stage1Result out;
  out.model = adapter_init(config.latent_dim, rng_init);
  out.bank = make_center_bank(faces.num_classes(), config.center_alpha);

  // Warm pass: centers from the untrained model's mean predictions, in
  // dataset order, so every label has a center before the first batch.
  {
    Mat s_all(faces.size(), kVoiceDim);
    std::vector<std::uint32_t> labels(faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i) {
      const auto s = adapter_forward_mean(out.model, faces.vec_double(i));
      std::copy(s.begin(), s.end(), s_all.row(i));
      labels[i] = faces.label_id(i);
    }
    update_centers(out.bank, s_all, labels);
  }

  AdamState adam = make_adam_state(out.model);
  const std::size_t n = faces.size();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = shuffled_indices(n, rng_order);
    LossTerms epoch_terms;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, n - start);
      const GatheredBatch gb =
          gather(faces, voices, {order.data() + start, len});
      const Stage1Noise noise =
          draw_stage1_noise(len, config.latent_dim, rng_noise);
      const BatchView view{gb.faces, gb.targets, gb.labels};
      GradientBundle bundle =
          loss_stage1(out.model, view, out.bank, config, noise);
      adam_step(out.model, bundle.grad, adam, config.learning_rate,
                config.adam_beta1, config.adam_beta2, config.adam_epsilon);
      update_centers(out.bank, bundle.s_pred, gb.labels);
      accumulate_terms(epoch_terms, bundle.terms,
                       static_cast<double>(len) / static_cast<double>(n));
    }
    out.log.epochs.push_back({epoch, epoch_terms});
  }
  return out;
}

Stage2Result train_stage2(AdapterModel model, const EmbeddingSet& faces,
                          const EmbeddingSet& voices,
                          const SurrogateStack& stack,
                          const Stage2Config& config) {
  validate_paired(faces, voices);
  require(config.batch_size >= 1, "train_stage2: batch_size must be >= 1");

  RandomSource root(config.seed);
  RandomSource rng_order = root.split(2);
  RandomSource rng_noise = root.split(3);

  Stage2Result out;
  out.model = std::move(model);
  AdamState adam = make_adam_state(out.model);
  const std::size_t n = faces.size();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = shuffled_indices(n, rng_order);
    LossTerms epoch_terms;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, n - start);
      const GatheredBatch gb =
          gather(faces, voices, {order.data() + start, len});
      const Stage2Noise noise =
          draw_stage2_noise(len, out.model.latent_dim, rng_noise);
      const BatchView view{gb.faces, gb.targets, gb.labels};
      GradientBundle bundle =
          loss_stage2(out.model, stack, view, config, noise);
      adam_step(out.model, bundle.grad, adam, config.learning_rate,
                config.adam_beta1, config.adam_beta2, config.adam_epsilon);
      accumulate_terms(epoch_terms, bundle.terms,
                       static_cast<double>(len) / static_cast<double>(n));
    }
    out.log.epochs.push_back({epoch, epoch_terms});
  }
  return out;
}

double mean_validation_cosine(const AdapterModel& model,
                              const EmbeddingSet& faces,
                              const EmbeddingSet& voices) {
  validate_paired(faces, voices);
  double acc = 0.0;
  std::vector<double> v(kFaceDim), t(kVoiceDim);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const auto fv = faces.vec(i);
    for (std::size_t j = 0; j < kFaceDim; ++j) v[j] = fv[j];
    const auto s = adapter_forward_mean(model, v);
    const auto tv = voices.vec(i);
    for (std::size_t j = 0; j < kVoiceDim; ++j) t[j] = tv[j];
    acc += cosine_similarity(s, t);
  }
  return acc / static_cast<double>(faces.size());
}

EmbeddingSet generate_voices(const AdapterModel& model,
                             const EmbeddingSet& faces,
                             const std::vector<std::string>& keep_labels,
                             std::size_t draws_per_face,
                             bool sample_latent_path, RandomSource& rng) {
  require(faces.dim() == kFaceDim, "generate_voices: faces must be 512-d");
  require(draws_per_face >= 1, "generate_voices: draws_per_face must be >= 1");
  std::unordered_set<std::string> keep(keep_labels.begin(), keep_labels.end());

  EmbeddingSet::Builder builder(kVoiceDim);
  std::vector<double> v(kFaceDim);
  std::vector<float> sf(kVoiceDim);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const std::string& name = faces.label_name(faces.label_id(i));
    if (!keep.empty() && keep.find(name) == keep.end()) continue;
    const auto fv = faces.vec(i);
    for (std::size_t j = 0; j < kFaceDim; ++j) v[j] = fv[j];
    const EncodeResult enc = encode(model, v);
    for (std::size_t d = 0; d < draws_per_face; ++d) {
      std::vector<double> s;
      if (sample_latent_path) {
        const auto z = sample_latent(enc.mu, enc.logvar, rng);
        s = decode(model, z).s;
      } else {
        s = decode(model, enc.mu).s;
      }
      for (std::size_t j = 0; j < kVoiceDim; ++j) {
        sf[j] = static_cast<float>(s[j]);
      }
      builder.add(name, sf);
    }
  }
  return builder.build();
}

}  // namespace f2vs
