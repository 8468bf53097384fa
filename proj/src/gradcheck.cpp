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

#include "f2vs/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <unordered_set>

#include "f2vs/mmd.hpp"

namespace f2vs {
namespace {

constexpr double kRelErrFloor = 1e-7;

std::vector<std::size_t> pick_coords(std::size_t block_size,
                                     std::size_t coords_per_block,
                                     std::size_t argmax,
                                     RandomSource& rng) {
  if (block_size <= coords_per_block) {
    std::vector<std::size_t> all(block_size);
    for (std::size_t i = 0; i < block_size; ++i) all[i] = i;
    return all;
  }
  std::unordered_set<std::size_t> chosen;
  chosen.insert(argmax);
  while (chosen.size() < coords_per_block) {
    chosen.insert(rng.uniform_index(block_size));
  }
  std::vector<std::size_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

GradcheckReport run_check(AdapterModel model, const GradientBundle& analytic,
                          const std::function<double(const AdapterModel&)>& value,
                          std::size_t coords_per_block, RandomSource& rng) {
  require(coords_per_block >= 1,
          "gradcheck: coords_per_block must be positive");
  GradcheckReport report;
  auto mblocks = param_blocks(model);
  auto gblocks = param_blocks(const_cast<AdapterModel&>(analytic.grad));

  for (std::size_t b = 0; b < mblocks.size(); ++b) {
    const double* g = gblocks[b].data;
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < gblocks[b].size; ++i) {
      if (std::abs(g[i]) > std::abs(g[argmax])) argmax = i;
    }
    const auto coords =
        pick_coords(mblocks[b].size, coords_per_block, argmax, rng);

    BlockCheck check;
    check.name = mblocks[b].name;
    check.coords_checked = coords.size();
    double* p = mblocks[b].data;
    for (const std::size_t i : coords) {
      const double old = p[i];
      p[i] = old + kGradcheckStep;
      const double lp = value(model);
      p[i] = old - kGradcheckStep;
      const double lm = value(model);
      p[i] = old;
      const double fd = (lp - lm) / (2.0 * kGradcheckStep);
      const double an = g[i];
      const double rel = std::abs(fd - an) /
                         std::max({std::abs(an), std::abs(fd), kRelErrFloor});
      check.max_rel_err = std::max(check.max_rel_err, rel);
    }
    check.pass = check.max_rel_err <= kGradcheckTolerance;
    report.pass = report.pass && check.pass;
    report.blocks.push_back(std::move(check));
  }
  return report;
}

}  // namespace

std::string render_gradcheck(const GradcheckReport& report) {
  std::string out = "block,max_rel_err,coords,pass\n";
  char buf[128];
  for (const auto& b : report.blocks) {
    std::snprintf(buf, sizeof(buf), "%s,%.3e,%zu,%s\n", b.name.c_str(),
                  b.max_rel_err, b.coords_checked, b.pass ? "yes" : "no");
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "overall,%s (step %.0e, tolerance %.0e)\n",
                report.pass ? "pass" : "fail", report.step, report.tolerance);
  out += buf;
  return out;
}

Stage1Noise pin_bandwidth(const AdapterModel& model, const BatchView& batch,
                          const Stage1Config& config, Stage1Noise noise) {
  if (config.lambda_mmd == 0.0 || noise.fixed_bandwidth > 0.0) return noise;
  Mat z(batch.faces.rows, model.latent_dim);
  for (std::size_t n = 0; n < batch.faces.rows; ++n) {
    const EncodeResult enc = encode(model, batch.faces.row_span(n));
    double* zr = z.row(n);
    const double* eta = noise.eta.row(n);
    for (std::size_t i = 0; i < model.latent_dim; ++i) {
      zr[i] = enc.mu[i] + std::exp(0.5 * enc.logvar[i]) * eta[i];
    }
  }
  noise.fixed_bandwidth = median_heuristic_bandwidth(z, noise.prior);
  return noise;
}

GradcheckReport gradcheck_stage1(const AdapterModel& model,
                                 const BatchView& batch,
                                 const CenterBank& bank,
                                 const Stage1Config& config,
                                 const Stage1Noise& noise,
                                 std::size_t coords_per_block,
                                 RandomSource& check_rng) {
  const Stage1Noise pinned = pin_bandwidth(model, batch, config, noise);
  const GradientBundle analytic =
      loss_stage1(model, batch, bank, config, pinned);
  return gradcheck_stage1_bundle(model, batch, bank, config, pinned, analytic,
                                 coords_per_block, check_rng);
}

GradcheckReport gradcheck_stage1_bundle(const AdapterModel& model,
                                        const BatchView& batch,
                                        const CenterBank& bank,
                                        const Stage1Config& config,
                                        const Stage1Noise& noise,
                                        const GradientBundle& analytic,
                                        std::size_t coords_per_block,
                                        RandomSource& check_rng) {
  require(config.lambda_mmd == 0.0 || noise.fixed_bandwidth > 0.0,
          "gradcheck: bandwidth must be pinned before checking");
  auto value = [&](const AdapterModel& m) {
    return loss_stage1_value(m, batch, bank, config, noise).total;
  };
  return run_check(model, analytic, value, coords_per_block, check_rng);
}

GradcheckReport gradcheck_stage2(const AdapterModel& model,
                                 const SurrogateStack& stack,
                                 const BatchView& batch,
                                 const Stage2Config& config,
                                 const Stage2Noise& noise,
                                 std::size_t coords_per_block,
                                 RandomSource& check_rng) {
  const GradientBundle analytic =
      loss_stage2(model, stack, batch, config, noise);
  return gradcheck_stage2_bundle(model, stack, batch, config, noise, analytic,
                                 coords_per_block, check_rng);
}

GradcheckReport gradcheck_stage2_bundle(const AdapterModel& model,
                                        const SurrogateStack& stack,
                                        const BatchView& batch,
                                        const Stage2Config& config,
                                        const Stage2Noise& noise,
                                        const GradientBundle& analytic,
                                        std::size_t coords_per_block,
                                        RandomSource& check_rng) {
  auto value = [&](const AdapterModel& m) {
    return loss_stage2_value(m, stack, batch, config, noise).total;
  };
  return run_check(model, analytic, value, coords_per_block, check_rng);
}

}  // namespace f2vs
