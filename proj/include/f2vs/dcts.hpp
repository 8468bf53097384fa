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

#ifndef F2VS_DCTS_HPP
#define F2VS_DCTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "f2vs/embedding.hpp"
#include "f2vs/independence.hpp"
#include "f2vs/random.hpp"

namespace f2vs {

// Scores a labeled embedding set on two axes: how much more statistically
// dependent same-class samples are than cross-class samples (RIR), and how
// much farther apart classes sit than their members (RCR). The combined
// score is 0.5 when the two structures are indistinguishable and grows
// toward 1 as class structure strengthens.
struct DctsConfig {
  std::size_t tuple_size = 2;  // K
  EstimatorSpec estimator;
  std::size_t projection_dims = 1;
  double epsilon = 1e-8;
  std::size_t n_intra_tuples = 1000;
  std::size_t n_inter_tuples = 1000;
  std::size_t n_pairs = 2000;
  std::size_t n_eval = 2000;
  // Estimates below this are statistically indistinguishable from zero at
  // the sample counts above; both sides of the independence ratio are
  // floored here so that two null estimates compare as equal instead of
  // as a ratio of noise. Zero disables the floor.
  double independence_resolution = 0.05;
  std::uint64_t seed = 0;
};

struct PerClassStat {
  std::uint32_t label_id = 0;
  std::string name;
  double d_intra = 0.0;
  std::size_t pairs = 0;
};

struct DctsReport {
  double i_intra = 0.0;
  double i_inter = 0.0;
  double rir = 0.0;
  double d_intra = 0.0;
  double d_inter = 0.0;
  double rcr = 0.0;
  double dcts = 0.0;
  bool rcr_saturated = false;   // d_intra hit zero; rcr uses epsilon alone
  bool i_intra_clamped = false; // negative KL estimate clamped to 0
  bool i_inter_clamped = false;
  std::vector<PerClassStat> per_class;  // label-id order
  std::string config_summary;
};

enum class ReportFormat { text, csv };

// Each tuple's members come from one class, pairwise distinct.
TupleSet build_intra_tuples(const EmbeddingSet& set, std::size_t k,
                            std::size_t n, RandomSource& rng);

// Each tuple's members come from k pairwise-distinct classes.
TupleSet build_inter_tuples(const EmbeddingSet& set, std::size_t k,
                            std::size_t n, RandomSource& rng);

double relative_independence_ratio(double i_intra, double i_inter,
                                   double epsilon);

struct CosineRatio {
  double rcr = 0.0;
  double d_intra = 0.0;
  double d_inter = 0.0;
  bool saturated = false;
  std::vector<PerClassStat> per_class;
};

CosineRatio relative_cosine_ratio(const EmbeddingSet& set, std::size_t n_pairs,
                                  double epsilon, RandomSource& rng);

// sqrt( rir/(rir+1) * rcr/(rcr+1) ); maps (1,1) to exactly 0.5.
double combine_dcts(double rir, double rcr);

DctsReport evaluate_dcts(const EmbeddingSet& set, const DctsConfig& config);

std::string render_report(const DctsReport& report, ReportFormat format);

// Returns a set with the same vectors and a label sequence permuted by a
// Fisher-Yates shuffle from rng (the null model for the 0.5 boundary).
EmbeddingSet shuffle_labels(const EmbeddingSet& set, RandomSource& rng);

}  // namespace f2vs

#endif  // F2VS_DCTS_HPP
