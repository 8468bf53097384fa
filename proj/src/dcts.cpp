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

#include "f2vs/dcts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace f2vs {
namespace {

void append_f(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  out += buf;
}

// First k elements of a Fisher-Yates pass over items, using rng.
template <typename T>
void partial_shuffle(std::vector<T>& items, std::size_t k, RandomSource& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(items.size() - i);
    std::swap(items[i], items[j]);
  }
}

void copy_record(const EmbeddingSet& set, std::size_t rec, double* out) {
  const auto v = set.vec(rec);
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = v[j];
}

}  // namespace

TupleSet build_intra_tuples(const EmbeddingSet& set, std::size_t k,
                            std::size_t n, RandomSource& rng) {
  require(k >= 2, "build_intra_tuples: tuple size must be at least 2");
  require(n >= 1, "build_intra_tuples: need at least 1 tuple");
  std::vector<std::uint32_t> eligible;
  for (std::uint32_t c = 0; c < set.num_classes(); ++c) {
    if (set.class_count(c) >= k) eligible.push_back(c);
  }
  require(!eligible.empty(),
          "build_intra_tuples: no class has enough members for the tuple size");

  TupleSet tuples;
  tuples.k = k;
  tuples.dim = set.dim();
  tuples.data = Mat(n, k * set.dim());
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t c = eligible[rng.uniform_index(eligible.size())];
    members = set.class_members(c);
    partial_shuffle(members, k, rng);
    double* row = tuples.data.row(i);
    for (std::size_t s = 0; s < k; ++s) {
      copy_record(set, members[s], row + s * set.dim());
    }
  }
  return tuples;
}

TupleSet build_inter_tuples(const EmbeddingSet& set, std::size_t k,
                            std::size_t n, RandomSource& rng) {
  require(k >= 2, "build_inter_tuples: tuple size must be at least 2");
  require(n >= 1, "build_inter_tuples: need at least 1 tuple");
  require(set.num_classes() >= k,
          "build_inter_tuples: need at least k distinct classes");

  TupleSet tuples;
  tuples.k = k;
  tuples.dim = set.dim();
  tuples.data = Mat(n, k * set.dim());
  std::vector<std::uint32_t> classes(set.num_classes());
  for (std::uint32_t c = 0; c < set.num_classes(); ++c) classes[c] = c;
  for (std::size_t i = 0; i < n; ++i) {
    partial_shuffle(classes, k, rng);
    double* row = tuples.data.row(i);
    for (std::size_t s = 0; s < k; ++s) {
      const auto& members = set.class_members(classes[s]);
      const std::size_t rec = members[rng.uniform_index(members.size())];
      copy_record(set, rec, row + s * set.dim());
    }
  }
  return tuples;
}

double relative_independence_ratio(double i_intra, double i_inter,
                                   double epsilon) {
  require(i_intra >= 0.0 && i_inter >= 0.0,
          "relative_independence_ratio: inputs must be non-negative");
  require(epsilon > 0.0, "relative_independence_ratio: epsilon must be > 0");
  return i_intra / (i_inter + epsilon);
}

CosineRatio relative_cosine_ratio(const EmbeddingSet& set, std::size_t n_pairs,
                                  double epsilon, RandomSource& rng) {
  require(n_pairs >= 1, "relative_cosine_ratio: need at least 1 pair");
  require(epsilon > 0.0, "relative_cosine_ratio: epsilon must be > 0");
  require(set.num_classes() >= 2,
          "relative_cosine_ratio: need at least 2 classes");
  std::vector<std::uint32_t> multi;
  for (std::uint32_t c = 0; c < set.num_classes(); ++c) {
    if (set.class_count(c) >= 2) multi.push_back(c);
  }
  require(!multi.empty(),
          "relative_cosine_ratio: no class has 2 or more members");

  struct Acc {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::map<std::uint32_t, Acc> by_class;
  double intra_sum = 0.0;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const std::uint32_t c = multi[rng.uniform_index(multi.size())];
    const auto& members = set.class_members(c);
    const std::size_t a = rng.uniform_index(members.size());
    std::size_t b = rng.uniform_index(members.size() - 1);
    if (b >= a) ++b;
    const double d = cosine_distance(set.vec(members[a]), set.vec(members[b]));
    intra_sum += d;
    auto& acc = by_class[c];
    acc.sum += d;
    acc.count += 1;
  }

  double inter_sum = 0.0;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const std::uint32_t c1 =
        static_cast<std::uint32_t>(rng.uniform_index(set.num_classes()));
    std::uint32_t c2 =
        static_cast<std::uint32_t>(rng.uniform_index(set.num_classes() - 1));
    if (c2 >= c1) ++c2;
    const auto& m1 = set.class_members(c1);
    const auto& m2 = set.class_members(c2);
    inter_sum += cosine_distance(set.vec(m1[rng.uniform_index(m1.size())]),
                                 set.vec(m2[rng.uniform_index(m2.size())]));
  }

  CosineRatio out;
  out.d_intra = intra_sum / static_cast<double>(n_pairs);
  out.d_inter = inter_sum / static_cast<double>(n_pairs);
  out.saturated = out.d_intra == 0.0;
  out.rcr = out.d_inter / (out.d_intra + epsilon);
  for (const auto& [c, acc] : by_class) {
    out.per_class.push_back({c, set.label_name(c),
                             acc.sum / static_cast<double>(acc.count),
                             acc.count});
  }
  return out;
}

double combine_dcts(double rir, double rcr) {
  require(rir >= 0.0 && rcr >= 0.0,
          "combine_dcts: inputs must be non-negative");
  return std::sqrt((rir / (rir + 1.0)) * (rcr / (rcr + 1.0)));
}

DctsReport evaluate_dcts(const EmbeddingSet& set, const DctsConfig& config) {
  require(config.tuple_size >= 2, "evaluate_dcts: tuple_size must be >= 2");
  require(config.epsilon > 0.0, "evaluate_dcts: epsilon must be > 0");
  require(config.independence_resolution >= 0.0,
          "evaluate_dcts: independence_resolution must be >= 0");
  require(config.n_intra_tuples >= 30 && config.n_inter_tuples >= 30,
          "evaluate_dcts: tuple counts must be at least 30");

  RandomSource root(config.seed);
  RandomSource rng_intra = root.split(1);
  RandomSource rng_inter = root.split(2);
  RandomSource rng_est_intra = root.split(3);
  RandomSource rng_est_inter = root.split(4);
  RandomSource rng_pairs = root.split(5);

  const TupleSet intra = build_intra_tuples(set, config.tuple_size,
                                            config.n_intra_tuples, rng_intra);
  const TupleSet inter = build_inter_tuples(set, config.tuple_size,
                                            config.n_inter_tuples, rng_inter);
  const IndependenceEstimate ii =
      estimate_independence(intra, config.estimator, config.projection_dims,
                            config.n_eval, rng_est_intra);
  const IndependenceEstimate ij =
      estimate_independence(inter, config.estimator, config.projection_dims,
                            config.n_eval, rng_est_inter);
  const CosineRatio cr =
      relative_cosine_ratio(set, config.n_pairs, config.epsilon, rng_pairs);

  DctsReport rep;
  rep.i_intra = ii.value;
  rep.i_inter = ij.value;
  rep.i_intra_clamped = ii.clamped;
  rep.i_inter_clamped = ij.clamped;
  // On data with no class structure both KL estimates clamp to zero, and a
  // ratio of two censored values would read as signal where there is none.
  // Flooring both sides at the estimator's resolution makes two null
  // estimates compare as equal, which is what puts shuffled labels at 0.5.
  rep.rir = relative_independence_ratio(
      std::max(ii.value, config.independence_resolution),
      std::max(ij.value, config.independence_resolution), config.epsilon);
  rep.d_intra = cr.d_intra;
  rep.d_inter = cr.d_inter;
  rep.rcr = cr.rcr;
  rep.rcr_saturated = cr.saturated;
  rep.per_class = cr.per_class;
  rep.dcts = combine_dcts(rep.rir, rep.rcr);

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "K=%zu estimator=%s projection_dims=%zu epsilon=%g "
                "n_intra_tuples=%zu n_inter_tuples=%zu n_pairs=%zu "
                "n_eval=%zu independence_resolution=%g seed=%llu",
                config.tuple_size, config.estimator.describe().c_str(),
                config.projection_dims, config.epsilon, config.n_intra_tuples,
                config.n_inter_tuples, config.n_pairs, config.n_eval,
                config.independence_resolution,
                static_cast<unsigned long long>(config.seed));
  rep.config_summary = buf;
  return rep;
}

std::string render_report(const DctsReport& report, ReportFormat format) {
  std::string out;
  auto flags = [&]() {
    std::string f;
    if (report.rcr_saturated) f += "rcr_saturated;";
    if (report.i_intra_clamped) f += "i_intra_clamped;";
    if (report.i_inter_clamped) f += "i_inter_clamped;";
    if (!f.empty()) f.pop_back();
    return f;
  }();

  if (format == ReportFormat::csv) {
    out += "row,label,i_intra,i_inter,rir,d_intra,d_inter,rcr,dcts,pairs,flags\n";
    out += "aggregate,,";
    append_f(out, report.i_intra);
    out += ',';
    append_f(out, report.i_inter);
    out += ',';
    append_f(out, report.rir);
    out += ',';
    append_f(out, report.d_intra);
    out += ',';
    append_f(out, report.d_inter);
    out += ',';
    append_f(out, report.rcr);
    out += ',';
    append_f(out, report.dcts);
    out += ",," + flags + "\n";
    for (const auto& pc : report.per_class) {
      out += "class," + pc.name + ",,,,";
      append_f(out, pc.d_intra);
      out += ",,,," + std::to_string(pc.pairs) + ",\n";
    }
    return out;
  }

  auto line = [&](const char* name, double v) {
    out += name;
    out += ": ";
    append_f(out, v);
    out += '\n';
  };
  line("i_intra", report.i_intra);
  line("i_inter", report.i_inter);
  line("rir", report.rir);
  line("d_intra", report.d_intra);
  line("d_inter", report.d_inter);
  line("rcr", report.rcr);
  line("dcts", report.dcts);
  if (!flags.empty()) out += "flags: " + flags + "\n";
  out += "config: " + report.config_summary + "\n";
  for (const auto& pc : report.per_class) {
    out += "class " + pc.name + ": d_intra=";
    append_f(out, pc.d_intra);
    out += " pairs=" + std::to_string(pc.pairs) + "\n";
  }
  return out;
}

EmbeddingSet shuffle_labels(const EmbeddingSet& set, RandomSource& rng) {
  std::vector<std::size_t> order(set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const std::size_t j = i + rng.uniform_index(order.size() - i);
    std::swap(order[i], order[j]);
  }
  EmbeddingSet::Builder builder(set.dim());
  for (std::size_t i = 0; i < set.size(); ++i) {
    builder.add(set.label_name(set.label_id(order[i])), set.vec(i));
  }
  return builder.build();
}

}  // namespace f2vs
