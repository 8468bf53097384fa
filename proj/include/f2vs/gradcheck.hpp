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

#ifndef F2VS_GRADCHECK_HPP
#define F2VS_GRADCHECK_HPP

#include <string>
#include <vector>

#include "f2vs/losses.hpp"
#include "f2vs/surrogate.hpp"

namespace f2vs {

inline constexpr double kGradcheckStep = 1e-5;
inline constexpr double kGradcheckTolerance = 1e-4;

struct BlockCheck {
  std::string name;
  double max_rel_err = 0.0;
  std::size_t coords_checked = 0;
  bool pass = true;
};

struct GradcheckReport {
  std::vector<BlockCheck> blocks;
  bool pass = true;
  double step = kGradcheckStep;
  double tolerance = kGradcheckTolerance;
};

std::string render_gradcheck(const GradcheckReport& report);

// Central differences at step 1e-5 with the noise held fixed across every
// evaluation (common random numbers). Per block, coords_per_block
// coordinates are sampled plus the largest-magnitude analytic coordinate;
// blocks no larger than coords_per_block are checked exhaustively.
// Relative error |fd - an| / max(|an|, |fd|, 1e-7) must stay <= 1e-4.

// Recomputes z at the base point to pin the MMD bandwidth, so finite
// differences and the analytic gradient see the same constant sigma.
Stage1Noise pin_bandwidth(const AdapterModel& model, const BatchView& batch,
                          const Stage1Config& config, Stage1Noise noise);

GradcheckReport gradcheck_stage1(const AdapterModel& model,
                                 const BatchView& batch,
                                 const CenterBank& bank,
                                 const Stage1Config& config,
                                 const Stage1Noise& noise,
                                 std::size_t coords_per_block,
                                 RandomSource& check_rng);

// Checks a caller-supplied bundle instead of computing one (used to prove
// the checker catches corrupted gradients). noise must already be pinned.
GradcheckReport gradcheck_stage1_bundle(const AdapterModel& model,
                                        const BatchView& batch,
                                        const CenterBank& bank,
                                        const Stage1Config& config,
                                        const Stage1Noise& noise,
                                        const GradientBundle& analytic,
                                        std::size_t coords_per_block,
                                        RandomSource& check_rng);

GradcheckReport gradcheck_stage2(const AdapterModel& model,
                                 const SurrogateStack& stack,
                                 const BatchView& batch,
                                 const Stage2Config& config,
                                 const Stage2Noise& noise,
                                 std::size_t coords_per_block,
                                 RandomSource& check_rng);

GradcheckReport gradcheck_stage2_bundle(const AdapterModel& model,
                                        const SurrogateStack& stack,
                                        const BatchView& batch,
                                        const Stage2Config& config,
                                        const Stage2Noise& noise,
                                        const GradientBundle& analytic,
                                        std::size_t coords_per_block,
                                        RandomSource& check_rng);

}  // namespace f2vs

#endif  // F2VS_GRADCHECK_HPP
