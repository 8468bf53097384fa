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
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "f2vs/adapter.hpp"
#include "f2vs/common.hpp"
#include "f2vs/dcts.hpp"
#include "f2vs/embedding.hpp"
#include "f2vs/gradcheck.hpp"
#include "f2vs/independence.hpp"
#include "f2vs/losses.hpp"
#include "f2vs/random.hpp"
#include "f2vs/runconfig.hpp"
#include "f2vs/surrogate.hpp"
#include "f2vs/synthdata.hpp"
#include "f2vs/train.hpp"

namespace fs = std::filesystem;
using namespace f2vs;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string format = "text";
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_fixed(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

fs::path resolve_run_dir(const GlobalArgs& g, std::uint64_t seed) {
  if (!g.out_dir.empty()) return fs::path(g.out_dir);
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y%m%dT%H%M%SZ", &tm_utc);
  return fs::path("runs") / (std::string(stamp) + "-s" + std::to_string(seed));
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), "cannot open for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  require(out.good(), "write failed: " + path.string());
}

EmbeddingFormat format_from_path(const std::string& path) {
  const fs::path p(path);
  return p.extension() == ".jsonl" ? EmbeddingFormat::jsonl
                                   : EmbeddingFormat::binary;
}

RunConfig load_config(const GlobalArgs& g) {
  if (g.config_path.empty()) return RunConfig{};
  return RunConfig::from_file(g.config_path);
}

struct SplitManifest {
  std::vector<std::string> train_labels;
  std::vector<std::string> test_labels;
};

SplitManifest read_split_manifest(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), "split manifest not readable: " + path.string());
  SplitManifest out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line == "label,split") {
      first = false;
      continue;
    }
    first = false;
    const std::size_t comma = line.find(',');
    require(comma != std::string::npos,
            "split manifest: expected label,split line, got '" + line + "'");
    const std::string label = line.substr(0, comma);
    const std::string split = line.substr(comma + 1);
    if (split == "train") {
      out.train_labels.push_back(label);
    } else if (split == "test") {
      out.test_labels.push_back(label);
    } else {
      throw ValidationError("split manifest: unknown split '" + split + "'");
    }
  }
  require(!out.train_labels.empty(), "split manifest: no train labels");
  return out;
}

// ------------------------------------------------------------------ gen-data

int cmd_gen_data(const GlobalArgs& g) {
  const RunConfig file = load_config(g);
  file.check_known({"synth.n_speakers", "synth.samples_per_speaker",
                    "synth.face_rank", "synth.sigma_face",
                    "synth.sigma_voice", "synth.holdout_fraction",
                    "synth.map_seed", "synth.data_seed"});

  SynthConfig cfg;
  cfg.n_speakers = file.get_size("synth.n_speakers", cfg.n_speakers);
  cfg.samples_per_speaker =
      file.get_size("synth.samples_per_speaker", cfg.samples_per_speaker);
  cfg.face_rank = file.get_size("synth.face_rank", cfg.face_rank);
  cfg.sigma_face = file.get_double("synth.sigma_face", cfg.sigma_face);
  cfg.sigma_voice = file.get_double("synth.sigma_voice", cfg.sigma_voice);
  cfg.holdout_fraction =
      file.get_double("synth.holdout_fraction", cfg.holdout_fraction);
  cfg.map_seed = file.get_u64("synth.map_seed", cfg.map_seed);
  cfg.data_seed = file.get_u64("synth.data_seed", cfg.data_seed);
  if (g.seed_given) cfg.data_seed = g.seed;

  RunConfig resolved;
  resolved.set("synth.n_speakers", std::to_string(cfg.n_speakers));
  resolved.set("synth.samples_per_speaker",
               std::to_string(cfg.samples_per_speaker));
  resolved.set("synth.face_rank", std::to_string(cfg.face_rank));
  resolved.set("synth.sigma_face", format_double(cfg.sigma_face));
  resolved.set("synth.sigma_voice", format_double(cfg.sigma_voice));
  resolved.set("synth.holdout_fraction",
               format_double(cfg.holdout_fraction));
  resolved.set("synth.map_seed", std::to_string(cfg.map_seed));
  resolved.set("synth.data_seed", std::to_string(cfg.data_seed));

  const SynthData data = generate_synth_data(cfg);

  const fs::path dir = resolve_run_dir(g, cfg.data_seed);
  fs::create_directories(dir);
  write_embeddings(data.faces, (dir / "faces.bin").string(),
                   EmbeddingFormat::binary);
  write_embeddings(data.voices, (dir / "voices.bin").string(),
                   EmbeddingFormat::binary);
  write_file(dir / "split.txt", render_split_manifest(data));
  write_file(dir / "resolved.cfg", resolved.render());

  std::cout << "wrote " << (dir / "faces.bin").string() << " ("
            << data.faces.size() << " records, dim " << data.faces.dim()
            << ")\n";
  std::cout << "wrote " << (dir / "voices.bin").string() << " ("
            << data.voices.size() << " records, dim " << data.voices.dim()
            << ")\n";
  std::cout << "wrote " << (dir / "split.txt").string() << " ("
            << data.train_labels.size() << " train / "
            << data.test_labels.size() << " test speakers)\n";
  return 0;
}

// --------------------------------------------------------------------- train

int cmd_train(const GlobalArgs& g, int stage, const std::string& data_dir,
              const std::string& init_path) {
  const RunConfig file = load_config(g);
  file.check_known({
      "stage1.lambda_rec", "stage1.lambda_con", "stage1.lambda_cen",
      "stage1.lambda_mmd", "stage1.margin", "stage1.center_alpha",
      "stage1.batch_size", "stage1.learning_rate", "stage1.adam_beta1",
      "stage1.adam_beta2", "stage1.adam_epsilon", "stage1.epochs",
      "stage1.latent_dim", "stage1.seed",
      "stage2.lambda_tts", "stage2.lambda_vec", "stage2.batch_size",
      "stage2.learning_rate", "stage2.adam_beta1", "stage2.adam_beta2",
      "stage2.adam_epsilon", "stage2.epochs", "stage2.seed",
      "stage2.surrogate_seed",
  });

  const fs::path data(data_dir);
  const EmbeddingSet faces = read_embeddings((data / "faces.bin").string(),
                                             EmbeddingFormat::binary);
  const EmbeddingSet voices = read_embeddings((data / "voices.bin").string(),
                                              EmbeddingFormat::binary);
  const SplitManifest split = read_split_manifest(data / "split.txt");
  const EmbeddingSet faces_train = subset_by_labels(faces, split.train_labels);
  const EmbeddingSet voices_train =
      subset_by_labels(voices, split.train_labels);
  validate_paired(faces_train, voices_train);

  RunConfig resolved;
  fs::path dir;
  AdapterModel trained = adapter_zeros(1);
  std::string log_csv;
  double val_cosine = -2.0;

  if (stage == 1) {
    Stage1Config cfg;
    cfg.lambda_rec = file.get_double("stage1.lambda_rec", cfg.lambda_rec);
    cfg.lambda_con = file.get_double("stage1.lambda_con", cfg.lambda_con);
    cfg.lambda_cen = file.get_double("stage1.lambda_cen", cfg.lambda_cen);
    cfg.lambda_mmd = file.get_double("stage1.lambda_mmd", cfg.lambda_mmd);
    cfg.margin = file.get_double("stage1.margin", cfg.margin);
    cfg.center_alpha = file.get_double("stage1.center_alpha",
                                       cfg.center_alpha);
    cfg.batch_size = file.get_size("stage1.batch_size", cfg.batch_size);
    cfg.learning_rate = file.get_double("stage1.learning_rate",
                                        cfg.learning_rate);
    cfg.adam_beta1 = file.get_double("stage1.adam_beta1", cfg.adam_beta1);
    cfg.adam_beta2 = file.get_double("stage1.adam_beta2", cfg.adam_beta2);
    cfg.adam_epsilon = file.get_double("stage1.adam_epsilon",
                                       cfg.adam_epsilon);
    cfg.epochs = file.get_size("stage1.epochs", cfg.epochs);
    cfg.latent_dim = file.get_size("stage1.latent_dim", cfg.latent_dim);
    cfg.seed = file.get_u64("stage1.seed", cfg.seed);
    if (g.seed_given) cfg.seed = g.seed;

    resolved.set("stage1.lambda_rec", format_double(cfg.lambda_rec));
    resolved.set("stage1.lambda_con", format_double(cfg.lambda_con));
    resolved.set("stage1.lambda_cen", format_double(cfg.lambda_cen));
    resolved.set("stage1.lambda_mmd", format_double(cfg.lambda_mmd));
    resolved.set("stage1.margin", format_double(cfg.margin));
    resolved.set("stage1.center_alpha", format_double(cfg.center_alpha));
    resolved.set("stage1.batch_size", std::to_string(cfg.batch_size));
    resolved.set("stage1.learning_rate", format_double(cfg.learning_rate));
    resolved.set("stage1.adam_beta1", format_double(cfg.adam_beta1));
    resolved.set("stage1.adam_beta2", format_double(cfg.adam_beta2));
    resolved.set("stage1.adam_epsilon", format_double(cfg.adam_epsilon));
    resolved.set("stage1.epochs", std::to_string(cfg.epochs));
    resolved.set("stage1.latent_dim", std::to_string(cfg.latent_dim));
    resolved.set("stage1.seed", std::to_string(cfg.seed));

    Stage1Result result = train_stage1(faces_train, voices_train, cfg);
    trained = std::move(result.model);
    log_csv = render_stage1_log(result.log);
    dir = resolve_run_dir(g, cfg.seed);
  } else {
    require(!init_path.empty(),
            "train --stage 2 requires --init (stage-1 checkpoint)");
    AdapterModel init = load_adapter(init_path);

    Stage2Config cfg;
    cfg.lambda_tts = file.get_double("stage2.lambda_tts", cfg.lambda_tts);
    cfg.lambda_vec = file.get_double("stage2.lambda_vec", cfg.lambda_vec);
    cfg.batch_size = file.get_size("stage2.batch_size", cfg.batch_size);
    cfg.learning_rate = file.get_double("stage2.learning_rate",
                                        cfg.learning_rate);
    cfg.adam_beta1 = file.get_double("stage2.adam_beta1", cfg.adam_beta1);
    cfg.adam_beta2 = file.get_double("stage2.adam_beta2", cfg.adam_beta2);
    cfg.adam_epsilon = file.get_double("stage2.adam_epsilon",
                                       cfg.adam_epsilon);
    cfg.epochs = file.get_size("stage2.epochs", cfg.epochs);
    cfg.seed = file.get_u64("stage2.seed", cfg.seed);
    cfg.surrogate_seed = file.get_u64("stage2.surrogate_seed",
                                      cfg.surrogate_seed);
    if (g.seed_given) cfg.seed = g.seed;

    resolved.set("stage2.lambda_tts", format_double(cfg.lambda_tts));
    resolved.set("stage2.lambda_vec", format_double(cfg.lambda_vec));
    resolved.set("stage2.batch_size", std::to_string(cfg.batch_size));
    resolved.set("stage2.learning_rate", format_double(cfg.learning_rate));
    resolved.set("stage2.adam_beta1", format_double(cfg.adam_beta1));
    resolved.set("stage2.adam_beta2", format_double(cfg.adam_beta2));
    resolved.set("stage2.adam_epsilon", format_double(cfg.adam_epsilon));
    resolved.set("stage2.epochs", std::to_string(cfg.epochs));
    resolved.set("stage2.seed", std::to_string(cfg.seed));
    resolved.set("stage2.surrogate_seed", std::to_string(cfg.surrogate_seed));

    const SurrogateStack stack = make_surrogate(cfg.surrogate_seed);
    Stage2Result result =
        train_stage2(std::move(init), faces_train, voices_train, stack, cfg);
    trained = std::move(result.model);
    log_csv = render_stage2_log(result.log);
    dir = resolve_run_dir(g, cfg.seed);
  }

  if (!split.test_labels.empty()) {
    const EmbeddingSet faces_test = subset_by_labels(faces,
                                                     split.test_labels);
    const EmbeddingSet voices_test = subset_by_labels(voices,
                                                      split.test_labels);
    val_cosine = mean_validation_cosine(trained, faces_test, voices_test);
  }

  fs::create_directories(dir);
  save_adapter(trained, (dir / "adapter.f2vs").string());
  write_file(dir / "train_log.csv", log_csv);
  write_file(dir / "resolved.cfg", resolved.render());

  std::cout << "wrote " << (dir / "adapter.f2vs").string() << "\n";
  std::cout << "wrote " << (dir / "train_log.csv").string() << "\n";
  if (val_cosine > -2.0) {
    std::cout << "val_cosine: " << format_fixed(val_cosine) << "\n";
  }
  return 0;
}

// ----------------------------------------------------------------- eval-dcts

int cmd_eval_dcts(const GlobalArgs& g, const std::string& embeddings_path) {
  const RunConfig file = load_config(g);
  file.check_known({"dcts.tuple_size", "dcts.estimator",
                    "dcts.projection_dims", "dcts.epsilon",
                    "dcts.n_intra_tuples", "dcts.n_inter_tuples",
                    "dcts.n_pairs", "dcts.n_eval",
                    "dcts.kde_bandwidth_factor", "dcts.gmm_components",
                    "dcts.independence_resolution", "dcts.seed"});

  DctsConfig cfg;
  cfg.tuple_size = file.get_size("dcts.tuple_size", cfg.tuple_size);
  const std::string est = file.get_string("dcts.estimator", "kde");
  if (est == "kde") {
    cfg.estimator.kind = EstimatorKind::kde;
  } else if (est == "gmm") {
    cfg.estimator.kind = EstimatorKind::gmm;
  } else {
    throw ValidationError("dcts.estimator must be kde or gmm, got '" + est +
                          "'");
  }
  cfg.estimator.kde_bandwidth_factor = file.get_double(
      "dcts.kde_bandwidth_factor", cfg.estimator.kde_bandwidth_factor);
  cfg.estimator.gmm_components =
      file.get_size("dcts.gmm_components", cfg.estimator.gmm_components);
  cfg.projection_dims = file.get_size("dcts.projection_dims",
                                      cfg.projection_dims);
  cfg.epsilon = file.get_double("dcts.epsilon", cfg.epsilon);
  cfg.n_intra_tuples = file.get_size("dcts.n_intra_tuples",
                                     cfg.n_intra_tuples);
  cfg.n_inter_tuples = file.get_size("dcts.n_inter_tuples",
                                     cfg.n_inter_tuples);
  cfg.n_pairs = file.get_size("dcts.n_pairs", cfg.n_pairs);
  cfg.n_eval = file.get_size("dcts.n_eval", cfg.n_eval);
  cfg.independence_resolution = file.get_double(
      "dcts.independence_resolution", cfg.independence_resolution);
  cfg.seed = file.get_u64("dcts.seed", cfg.seed);
  if (g.seed_given) cfg.seed = g.seed;

  RunConfig resolved;
  resolved.set("dcts.tuple_size", std::to_string(cfg.tuple_size));
  resolved.set("dcts.estimator", est);
  resolved.set("dcts.kde_bandwidth_factor",
               format_double(cfg.estimator.kde_bandwidth_factor));
  resolved.set("dcts.gmm_components",
               std::to_string(cfg.estimator.gmm_components));
  resolved.set("dcts.projection_dims", std::to_string(cfg.projection_dims));
  resolved.set("dcts.epsilon", format_double(cfg.epsilon));
  resolved.set("dcts.n_intra_tuples", std::to_string(cfg.n_intra_tuples));
  resolved.set("dcts.n_inter_tuples", std::to_string(cfg.n_inter_tuples));
  resolved.set("dcts.n_pairs", std::to_string(cfg.n_pairs));
  resolved.set("dcts.n_eval", std::to_string(cfg.n_eval));
  resolved.set("dcts.independence_resolution",
               format_double(cfg.independence_resolution));
  resolved.set("dcts.seed", std::to_string(cfg.seed));

  const EmbeddingSet set =
      read_embeddings(embeddings_path, format_from_path(embeddings_path));
  const DctsReport report = evaluate_dcts(set, cfg);

  const fs::path dir = resolve_run_dir(g, cfg.seed);
  fs::create_directories(dir);
  write_file(dir / "report.txt", render_report(report, ReportFormat::text));
  write_file(dir / "report.csv", render_report(report, ReportFormat::csv));
  write_file(dir / "resolved.cfg", resolved.render());

  std::cout << render_report(report, g.format == "csv" ? ReportFormat::csv
                                                       : ReportFormat::text);
  return 0;
}

// ----------------------------------------------------------------- gradcheck

int cmd_gradcheck(const GlobalArgs& g) {
  const RunConfig file = load_config(g);
  file.check_known({"gradcheck.batch_size", "gradcheck.coords_per_block",
                    "gradcheck.latent_dim", "gradcheck.seed",
                    "gradcheck.surrogate_seed"});

  std::size_t batch_size = file.get_size("gradcheck.batch_size", 8);
  std::size_t coords = file.get_size("gradcheck.coords_per_block", 16);
  std::size_t latent_dim = file.get_size("gradcheck.latent_dim", 16);
  std::uint64_t seed = file.get_u64("gradcheck.seed", 7);
  std::uint64_t surrogate_seed = file.get_u64("gradcheck.surrogate_seed", 0);
  if (g.seed_given) seed = g.seed;
  require(batch_size >= 2, "gradcheck.batch_size must be >= 2");

  RunConfig resolved;
  resolved.set("gradcheck.batch_size", std::to_string(batch_size));
  resolved.set("gradcheck.coords_per_block", std::to_string(coords));
  resolved.set("gradcheck.latent_dim", std::to_string(latent_dim));
  resolved.set("gradcheck.seed", std::to_string(seed));
  resolved.set("gradcheck.surrogate_seed", std::to_string(surrogate_seed));

  // Small synthetic batch: two samples per speaker so the contrastive
  // term sees both same- and different-label pairs.
  SynthConfig synth;
  synth.n_speakers = (batch_size + 1) / 2;
  synth.samples_per_speaker = 2;
  synth.holdout_fraction = 0.0;
  synth.map_seed = seed + 1;
  synth.data_seed = seed + 2;
  const SynthData data = generate_synth_data(synth);

  Mat faces(batch_size, kFaceDim);
  Mat targets(batch_size, kVoiceDim);
  std::vector<std::uint32_t> labels(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const auto fv = data.faces.vec_double(i);
    const auto vv = data.voices.vec_double(i);
    std::copy(fv.begin(), fv.end(), faces.row(i));
    std::copy(vv.begin(), vv.end(), targets.row(i));
    labels[i] = data.faces.label_id(i);
  }
  const BatchView batch{faces, targets, labels};

  RandomSource root(seed);
  RandomSource init_rng = root.split(1);
  RandomSource noise_rng = root.split(2);
  RandomSource check_rng = root.split(3);
  const AdapterModel model = adapter_init(latent_dim, init_rng);

  CenterBank bank = make_center_bank(data.faces.num_classes(), 0.5);
  {
    Mat s_all(batch_size, kVoiceDim);
    for (std::size_t i = 0; i < batch_size; ++i) {
      const auto s = adapter_forward_mean(model, faces.row_span(i));
      std::copy(s.begin(), s.end(), s_all.row(i));
    }
    update_centers(bank, s_all, labels);
  }

  const Stage1Config cfg1;
  const Stage1Noise noise1 =
      draw_stage1_noise(batch_size, latent_dim, noise_rng);
  GradcheckReport rep1 =
      gradcheck_stage1(model, batch, bank, cfg1, noise1, coords, check_rng);

  const Stage2Config cfg2;
  const SurrogateStack stack = make_surrogate(surrogate_seed);
  const Stage2Noise noise2 =
      draw_stage2_noise(batch_size, latent_dim, noise_rng);
  GradcheckReport rep2 = gradcheck_stage2(model, stack, batch, cfg2, noise2,
                                          coords, check_rng);

  std::string text = "stage1\n" + render_gradcheck(rep1) + "stage2\n" +
                     render_gradcheck(rep2);

  const fs::path dir = resolve_run_dir(g, seed);
  fs::create_directories(dir);
  write_file(dir / "gradcheck.txt", text);
  write_file(dir / "resolved.cfg", resolved.render());
  std::cout << text;

  if (!rep1.pass || !rep2.pass) {
    std::cerr << "ERROR 2: gradient check failed (see "
              << (dir / "gradcheck.txt").string() << ")\n";
    return 2;
  }
  return 0;
}

// ------------------------------------------------------------------ mi-bench

int cmd_mi_bench(const GlobalArgs& g) {
  const RunConfig file = load_config(g);
  file.check_known({"mibench.n_tuples", "mibench.n_eval", "mibench.k",
                    "mibench.kde_bandwidth_factor", "mibench.gmm_components",
                    "mibench.seed"});

  const std::size_t n_tuples = file.get_size("mibench.n_tuples", 2000);
  const std::size_t n_eval = file.get_size("mibench.n_eval", 2000);
  const std::size_t k = file.get_size("mibench.k", 2);
  EstimatorSpec kde_spec;
  kde_spec.kind = EstimatorKind::kde;
  kde_spec.kde_bandwidth_factor = file.get_double(
      "mibench.kde_bandwidth_factor", kde_spec.kde_bandwidth_factor);
  EstimatorSpec gmm_spec;
  gmm_spec.kind = EstimatorKind::gmm;
  gmm_spec.gmm_components =
      file.get_size("mibench.gmm_components", gmm_spec.gmm_components);
  std::uint64_t seed = file.get_u64("mibench.seed", 0);
  if (g.seed_given) seed = g.seed;
  require(k >= 2, "mibench.k must be >= 2");

  RunConfig resolved;
  resolved.set("mibench.n_tuples", std::to_string(n_tuples));
  resolved.set("mibench.n_eval", std::to_string(n_eval));
  resolved.set("mibench.k", std::to_string(k));
  resolved.set("mibench.kde_bandwidth_factor",
               format_double(kde_spec.kde_bandwidth_factor));
  resolved.set("mibench.gmm_components",
               std::to_string(gmm_spec.gmm_components));
  resolved.set("mibench.seed", std::to_string(seed));

  const std::vector<double> rhos = {0.0, 0.3, 0.5, 0.7, 0.9};
  const RandomSource root(seed);

  std::string csv = "rho,analytic,kde,gmm,kde_abs_err,gmm_abs_err\n";
  for (std::size_t r = 0; r < rhos.size(); ++r) {
    const double rho = rhos[r];

    // Equicorrelated unit-variance Gaussian K-tuple via a shared factor.
    RandomSource data_rng = root.split(10 + r);
    TupleSet tuples;
    tuples.k = k;
    tuples.dim = 1;
    tuples.data = Mat(n_tuples, k);
    const double a = std::sqrt(rho);
    const double b = std::sqrt(1.0 - rho);
    for (std::size_t i = 0; i < n_tuples; ++i) {
      const double shared = data_rng.gaussian();
      for (std::size_t s = 0; s < k; ++s) {
        tuples.data(i, s) = a * shared + b * data_rng.gaussian();
      }
    }

    Mat corr(k, k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) corr(i, j) = i == j ? 1.0 : rho;
    }
    const double analytic = gaussian_total_correlation(corr);

    RandomSource kde_rng = root.split(20 + r);
    RandomSource gmm_rng = root.split(30 + r);
    const IndependenceEstimate kde_est =
        estimate_independence(tuples, kde_spec, 1, n_eval, kde_rng);
    const IndependenceEstimate gmm_est =
        estimate_independence(tuples, gmm_spec, 1, n_eval, gmm_rng);

    char row[160];
    std::snprintf(row, sizeof(row), "%.2f,%.6f,%.6f,%.6f,%.6f,%.6f\n", rho,
                  analytic, kde_est.value, gmm_est.value,
                  std::abs(kde_est.value - analytic),
                  std::abs(gmm_est.value - analytic));
    csv += row;
  }

  const fs::path dir = resolve_run_dir(g, seed);
  fs::create_directories(dir);
  write_file(dir / "mi_bench.csv", csv);
  write_file(dir / "resolved.cfg", resolved.render());
  std::cout << csv;
  return 0;
}

// -------------------------------------------------------------------- report

int cmd_report(const GlobalArgs& g, const std::vector<std::string>& inputs) {
  require(!inputs.empty(), "report: no input CSV files given");

  std::string merged = "name,rir,rcr,dcts\n";
  std::string joined_inputs;
  for (const std::string& path : inputs) {
    std::ifstream in(path);
    require(in.good(), "report input not readable: " + path);
    std::string line;
    bool found = false;
    while (std::getline(in, line)) {
      if (line.rfind("aggregate,", 0) != 0) continue;
      std::vector<std::string> cols;
      std::size_t pos = 0;
      while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
          cols.push_back(line.substr(pos));
          break;
        }
        cols.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
      }
      require(cols.size() >= 9,
              "report input has a malformed aggregate row: " + path);
      merged += fs::path(path).stem().string();
      merged += ',' + cols[4] + ',' + cols[7] + ',' + cols[8] + '\n';
      found = true;
      break;
    }
    require(found, "report input has no aggregate row: " + path);
    if (!joined_inputs.empty()) joined_inputs += ';';
    joined_inputs += path;
  }

  RunConfig resolved;
  resolved.set("report.inputs", joined_inputs);

  const fs::path dir = resolve_run_dir(g, g.seed_given ? g.seed : 0);
  fs::create_directories(dir);
  write_file(dir / "comparison.csv", merged);
  write_file(dir / "resolved.cfg", resolved.render());
  std::cout << merged;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"face-to-voice embedding toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs g;
  app.add_option("--config", g.config_path, "key=value config file");
  auto* seed_opt =
      app.add_option("--seed", g.seed, "master seed for the command");
  app.add_option("--out", g.out_dir,
                 "output directory (default: runs/<timestamp>-s<seed>)");
  app.add_option("--format", g.format, "stdout format")
      ->check(CLI::IsMember({"text", "csv"}));

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic corpus");

  auto* train = app.add_subcommand("train", "train the adapter");
  int stage = 1;
  std::string data_dir;
  std::string init_path;
  train->add_option("--stage", stage, "training stage")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  train->add_option("--data", data_dir, "gen-data output directory")
      ->required();
  train->add_option("--init", init_path, "stage-1 checkpoint (stage 2)");

  auto* eval = app.add_subcommand("eval-dcts", "score an embedding set");
  std::string embeddings_path;
  eval->add_option("--embeddings", embeddings_path, "embedding file")
      ->required();

  auto* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference gradient audit");

  auto* mibench = app.add_subcommand(
      "mi-bench", "estimator accuracy against the Gaussian oracle");

  auto* report =
      app.add_subcommand("report", "merge eval-dcts CSVs into one table");
  std::vector<std::string> report_inputs;
  report->add_option("inputs", report_inputs, "report.csv files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ERROR 1: " << e.what() << "\n";
    return 1;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (*gen) return cmd_gen_data(g);
    if (*train) return cmd_train(g, stage, data_dir, init_path);
    if (*eval) return cmd_eval_dcts(g, embeddings_path);
    if (*gradcheck) return cmd_gradcheck(g);
    if (*mibench) return cmd_mi_bench(g);
    if (*report) return cmd_report(g, report_inputs);
  } catch (const ValidationError& e) {
    std::cerr << "ERROR 1: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "ERROR 2: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ERROR 2: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
