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

#include "f2vs/independence.hpp"

#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

#include "f2vs/gmm.hpp"
#include "f2vs/kde.hpp"
#include "f2vs/pca.hpp"

namespace f2vs {
namespace {

Mat slot_columns(const Mat& src, std::size_t first_col, std::size_t width) {
  Mat out(src.rows, width);
  for (std::size_t i = 0; i < src.rows; ++i) {
    const double* r = src.row(i);
    double* o = out.row(i);
    for (std::size_t j = 0; j < width; ++j) o[j] = r[first_col + j];
  }
  return out;
}

}  // namespace

std::string EstimatorSpec::describe() const {
  if (kind == EstimatorKind::kde) return "kde";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "gmm(%zu)", gmm_components);
  return buf;
}

IndependenceEstimate estimate_independence(const TupleSet& tuples,
                                           const EstimatorSpec& estimator,
                                           std::size_t projection_dims,
                                           std::size_t n_eval,
                                           RandomSource& rng) {
  const std::size_t n = tuples.size();
  const std::size_t k = tuples.k;
  const std::size_t dim = tuples.dim;
  require(n >= 30, "estimate_independence: need at least 30 tuples");
  require(k >= 2, "estimate_independence: tuple size must be at least 2");
  require(projection_dims >= 1,
          "estimate_independence: projection_dims must be at least 1");
  require(projection_dims <= dim,
          "estimate_independence: projection_dims exceeds slot dimension");
  require(tuples.data.cols == k * dim,
          "estimate_independence: tuple matrix width mismatch");
  require(n_eval >= 1, "estimate_independence: n_eval must be positive");

  // One basis for every slot, fitted on all slot vectors pooled, so the
  // slots live in a common coordinate system.
  Mat pooled(n * k, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = tuples.data.row(i);
    for (std::size_t s = 0; s < k; ++s) {
      double* o = pooled.row(s * n + i);
      for (std::size_t j = 0; j < dim; ++j) o[j] = r[s * dim + j];
    }
  }
  const PcaBasis basis = pca_fit(pooled, projection_dims);

  const std::size_t p = projection_dims;
  Mat joint_pts(n, k * p);
  std::vector<double> slot(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = tuples.data.row(i);
    double* o = joint_pts.row(i);
    for (std::size_t s = 0; s < k; ++s) {
      for (std::size_t j = 0; j < dim; ++j) slot[j] = r[s * dim + j];
      const auto coords = pca_project(basis, slot);
      for (std::size_t j = 0; j < p; ++j) o[s * p + j] = coords[j];
    }
  }

  IndependenceEstimate out;
  out.n_tuples = n;
  out.k = k;
  out.projection_dims = p;
  out.estimator = estimator.describe();

  // The KL expectation is taken under the empirical tuple distribution:
  // all observed tuples when n_eval covers the set, a random subset
  // otherwise. Drawing evaluation points from the fitted joint instead
  // would re-add kernel noise along every axis, which measurably dilutes
  // strong dependence.
  const std::size_t n_used = std::min(n_eval, n);
  Mat eval(n_used, k * p);
  if (n_used == n) {
    eval = joint_pts;
  } else {
    for (std::size_t i = 0; i < n_used; ++i) {
      const std::size_t pick = rng.uniform_index(n);
      std::copy(joint_pts.row(pick), joint_pts.row(pick) + k * p,
                eval.row(i));
    }
  }

  std::vector<double> lp_joint;
  std::vector<std::vector<double>> lp_marg(k);

  if (estimator.kind == EstimatorKind::kde) {
    // The log-ratio mean needs more smoothing as the joint dimension grows:
    // neighbors thin out, the leave-one-out joint density gets noisier, and
    // the concavity of the log turns that noise into a downward bias. The
    // user factor is quoted at dimension 2 and rescaled by (d/2)^1.5, an
    // exponent fitted on gaussian benchmarks with known total correlation.
    const double dim_scale =
        std::pow(static_cast<double>(k * p) / 2.0, 1.5);
    const KdeModel joint =
        kde_fit_scaled(joint_pts, BandwidthRule::scott,
                       estimator.kde_bandwidth_factor * dim_scale);
    // Marginals reuse the joint bandwidth slice for their columns, so the
    // marginal of the joint mixture IS the marginal model and the density
    // ratio compares like against like.
    std::vector<KdeModel> marg;
    marg.reserve(k);
    for (std::size_t s = 0; s < k; ++s) {
      std::vector<double> h(joint.bandwidth.begin() + s * p,
                            joint.bandwidth.begin() + (s + 1) * p);
      marg.push_back(
          kde_with_bandwidth(slot_columns(joint_pts, s * p, p), std::move(h)));
    }
    // Every evaluation point is a training row, so each log density still
    // contains the point's own kernel. That self term inflates the joint
    // more than the marginals (it grows with dimension) and would bias the
    // KL upward, so it is removed: with log_norm = -log(n h-normalizer),
    // exp(lp - log_norm) recovers the kernel sum in which self counts as 1.
    const auto drop_self = [](std::vector<double>& lp, const KdeModel& m) {
      const double n_kernels = static_cast<double>(m.n());
      const double rescale = std::log(n_kernels / (n_kernels - 1.0));
      for (double& v : lp) {
        const double kernel_sum = std::exp(v - m.log_norm);
        v = std::log(std::max(kernel_sum - 1.0, 1e-300)) + m.log_norm +
            rescale;
      }
    };
    lp_joint = kde_log_density_batch(joint, eval);
    drop_self(lp_joint, joint);
    for (std::size_t s = 0; s < k; ++s) {
      lp_marg[s] = kde_log_density_batch(marg[s], slot_columns(eval, s * p, p));
      drop_self(lp_marg[s], marg[s]);
    }

    // Without its own kernel an isolated point's joint density collapses at
    // the kernel tail rate, far below anything the true density would give,
    // and one such point can drag the whole mean. Mixing a sliver of a
    // moment-matched diagonal Gaussian into joint and marginals floors each
    // log ratio near log(alpha) while leaving typical points untouched.
    constexpr double kDefensiveWeight = 1e-3;
    constexpr double kLog2Pi = 1.8378770664093454836;
    std::vector<double> col_mean(k * p, 0.0);
    std::vector<double> col_var(k * p, 0.0);
    for (std::size_t j = 0; j < k * p; ++j) {
      double m1 = 0.0;
      double m2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = joint_pts(i, j);
        m1 += x;
        m2 += x * x;
      }
      m1 /= static_cast<double>(n);
      col_mean[j] = m1;
      col_var[j] =
          std::max(m2 / static_cast<double>(n) - m1 * m1, 1e-12);
    }
    const auto mix = [&](double lp, double lq) {
      const double hi = std::max(lp, lq);
      return hi + std::log((1.0 - kDefensiveWeight) * std::exp(lp - hi) +
                           kDefensiveWeight * std::exp(lq - hi));
    };
    for (std::size_t i = 0; i < n_used; ++i) {
      const double* row = eval.row(i);
      double lq_joint = 0.0;
      for (std::size_t s = 0; s < k; ++s) {
        double lq = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
          const std::size_t c = s * p + j;
          const double d = row[c] - col_mean[c];
          lq += -0.5 * (kLog2Pi + std::log(col_var[c])) -
                0.5 * d * d / col_var[c];
        }
        lq_joint += lq;
        lp_marg[s][i] = mix(lp_marg[s][i], lq);
      }
      lp_joint[i] = mix(lp_joint[i], lq_joint);
    }
  } else {
    const GmmModel joint =
        gmm_fit(joint_pts, estimator.gmm_components, rng);
    std::vector<GmmModel> marg;
    marg.reserve(k);
    for (std::size_t s = 0; s < k; ++s) {
      marg.push_back(gmm_fit(slot_columns(joint_pts, s * p, p),
                             estimator.gmm_components, rng));
    }
    lp_joint = gmm_log_density_batch(joint, eval);
    for (std::size_t s = 0; s < k; ++s) {
      lp_marg[s] = gmm_log_density_batch(marg[s], slot_columns(eval, s * p, p));
    }
  }

  double acc = 0.0;
  for (std::size_t i = 0; i < n_used; ++i) {
    double term = lp_joint[i];
    for (std::size_t s = 0; s < k; ++s) term -= lp_marg[s][i];
    acc += term;
  }
  out.raw = acc / static_cast<double>(n_used);
  if (!std::isfinite(out.raw)) {
    throw NumericError("estimate_independence: non-finite KL estimate");
  }
  out.clamped = out.raw < 0.0;
  out.value = out.clamped ? 0.0 : out.raw;
  return out;
}

double gaussian_total_correlation(const Mat& correlation) {
  const std::size_t k = correlation.rows;
  require(k >= 1 && correlation.cols == k,
          "gaussian_total_correlation: matrix must be square");
  for (std::size_t i = 0; i < k; ++i) {
    require(std::abs(correlation(i, i) - 1.0) <= 1e-9,
            "gaussian_total_correlation: diagonal must be 1");
    for (std::size_t j = i + 1; j < k; ++j) {
      require(std::abs(correlation(i, j) - correlation(j, i)) <= 1e-9,
              "gaussian_total_correlation: matrix must be symmetric");
    }
  }
  std::vector<double> evals;
  Mat vecs;
  jacobi_eigen(correlation, evals, vecs);
  double log_det = 0.0;
  for (double ev : evals) {
    if (ev <= 0.0) {
      throw NumericError(
          "gaussian_total_correlation: matrix is not positive definite");
    }
    log_det += std::log(ev);
  }
  return -0.5 * log_det;
}

}  // namespace f2vs
