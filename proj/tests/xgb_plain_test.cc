/*
 * Copyright 2026 The SSXGB Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ssxgb/xgb_plain.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "ssxgb/errors.h"
#include "ssxgb/random.h"
#include "test_support.h"

namespace ssxgb {
namespace {

using testing::four_row_dataset;
using testing::random_dataset;

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Least-squares cubic on a dense grid of [lo, hi] via the normal equations.
std::array<double, 4> fit_cubic(double lo, double hi, int points) {
  double a[4][5] = {};
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    const double phi[4] = {1, x, x * x, x * x * x};
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) a[r][c] += phi[r] * phi[c];
      a[r][4] += phi[r] * sigmoid(x);
    }
  }
  for (int p = 0; p < 4; ++p) {  // Gauss-Jordan, well conditioned enough here
    for (int r = 0; r < 4; ++r) {
      if (r == p) continue;
      const double f = a[r][p] / a[p][p];
      for (int c = p; c < 5; ++c) a[r][c] -= f * a[p][c];
    }
  }
  return {a[0][4] / a[0][0], a[1][4] / a[1][1], a[2][4] / a[2][2],
          a[3][4] / a[3][3]};
}

double max_cubic_error(double lo, double hi) {
  double worst = 0.0;
  for (int i = 0; i <= 120000; ++i) {
    const double x = lo + (hi - lo) * i / 120000.0;
    worst = std::max(worst, std::abs(sigmoid_cubic(x) - sigmoid(x)));
  }
  return worst;
}

TEST(Sigmoid, CubicIsTheLeastSquaresFitOnEightInterval) {
  const auto c = fit_cubic(-8.0, 8.0, 160001);
  EXPECT_NEAR(c[0], kSigmoidC0, 1e-9);
  EXPECT_NEAR(c[1], kSigmoidC1, 1e-6);
  EXPECT_NEAR(c[2], 0.0, 1e-9);
  EXPECT_NEAR(c[3], kSigmoidC3, 1e-7);
  EXPECT_DOUBLE_EQ(sigmoid_cubic(0.0), 0.5);
  EXPECT_DOUBLE_EQ(sigmoid_cubic(2.0),
                   kSigmoidC0 + 2 * kSigmoidC1 + 8 * kSigmoidC3);
}

TEST(Sigmoid, CubicErrorOnSixIntervalIsBelowTenHundredths) {
  EXPECT_LT(max_cubic_error(-6.0, 6.0), 0.1);
}

// Lower bound on the uniform error of any cubic on [-6, 6]: if q - sigmoid
// alternates in sign at five points, no cubic does better than the smallest
// of those errors there.
TEST(Sigmoid, NoCubicStaysWithinThreeHundredthsOnSixInterval) {
  const auto c = fit_cubic(-6.0, 6.0, 24001);
  auto err = [&](double x) {
    return c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x - sigmoid(x);
  };
  // Alternation points from the error extrema of the fit.
  std::vector<double> ext = {-6.0};
  for (int i = 1; i < 12000; ++i) {
    const double x0 = -6.0 + 12.0 * (i - 1) / 12000, x1 = -6.0 + 12.0 * i / 12000,
                 x2 = -6.0 + 12.0 * (i + 1) / 12000;
    const double e0 = std::abs(err(x0)), e1 = std::abs(err(x1)),
                 e2 = std::abs(err(x2));
    if (e1 >= e0 && e1 >= e2) ext.push_back(x1);
  }
  ext.push_back(6.0);
  // Keep alternating extrema, taking the larger within a same-sign run.
  std::vector<double> alt;
  for (double x : ext) {
    if (!alt.empty() && (err(alt.back()) > 0) == (err(x) > 0)) {
      if (std::abs(err(x)) > std::abs(err(alt.back()))) alt.back() = x;
    } else {
      alt.push_back(x);
    }
  }
  ASSERT_GE(alt.size(), 5u);
  // Best window of five consecutive alternating points.
  double bound = 0.0;
  for (std::size_t s = 0; s + 5 <= alt.size(); ++s) {
    double m = 1.0;
    for (std::size_t k = s; k < s + 5; ++k) m = std::min(m, std::abs(err(alt[k])));
    bound = std::max(bound, m);
  }
  EXPECT_GT(bound, 0.03);
}

TEST(BaseScore, Examples) {
  EXPECT_DOUBLE_EQ(compute_base_score({0, 1, 0, 1}), 0.0);
  EXPECT_NEAR(compute_base_score({1, 1, 1, 0}), std::log(3.0), 1e-12);
  EXPECT_NEAR(compute_base_score({1, 1, 1}), std::log((1 - 1e-5) / 1e-5), 1e-9);
  EXPECT_THROW(compute_base_score({}), std::invalid_argument);
}

TEST(Gradients, Examples) {
  const GradPair a = gradients({1}, {0});
  EXPECT_DOUBLE_EQ(a.g[0], -0.5);
  EXPECT_DOUBLE_EQ(a.h[0], 0.25);
  const GradPair b = gradients({0}, {0});
  EXPECT_DOUBLE_EQ(b.g[0], 0.5);
  EXPECT_DOUBLE_EQ(b.h[0], 0.25);
  const GradPair c = gradients({1}, {1.5}, Link::kCubic);
  const double s = sigmoid_cubic(1.5);
  EXPECT_DOUBLE_EQ(c.g[0], s - 1);
  EXPECT_DOUBLE_EQ(c.h[0], s * (1 - s));
}

TEST(Gradients, MatchFiniteDifferencesOfLogLoss) {
  RandomSource rng(1);
  auto loss = [](double y, double f) {
    const double p = sigmoid(f);
    return -(y * std::log(p) + (1 - y) * std::log(1 - p));
  };
  for (int i = 0; i < 100; ++i) {
    const double y = rng.coin() ? 1.0 : 0.0;
    const double f = (rng.uniform01() - 0.5) * 8.0;
    const double e = 1e-4;
    const double d1 = (loss(y, f + e) - loss(y, f - e)) / (2 * e);
    const double d2 = (loss(y, f + e) - 2 * loss(y, f) + loss(y, f - e)) / (e * e);
    const GradPair gh = gradients({y}, {f});
    EXPECT_NEAR(gh.g[0], d1, 1e-5 * std::max(1.0, std::abs(d1)));
    EXPECT_NEAR(gh.h[0], d2, 1e-5 * std::max(1.0, std::abs(d2)) + 1e-6);
  }
}

// Cut rule written out independently.
std::vector<double> oracle_thresholds(std::vector<double> v, int k) {
  std::sort(v.begin(), v.end());
  const int n = static_cast<int>(v.size());
  std::vector<double> out;
  if (n < 2) return out;
  for (int i = 1; i <= k; ++i) {
    int c = static_cast<int>(std::ceil(static_cast<double>(i) * n / (k + 1)));
    c = std::min(std::max(c, 1), n - 1);
    const double t = (v[c - 1] + v[c]) / 2;
    if (t <= v[0]) continue;
    if (!out.empty() && out.back() == t) continue;
    out.push_back(t);
  }
  return out;
}

TEST(Thresholds, MatchCutRuleOracle) {
  RandomSource rng(2);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.index(60);
    const int k = 1 + static_cast<int>(rng.index(20));
    std::vector<double> v(n);
    for (double& x : v) x = static_cast<double>(rng.index(10));
    ASSERT_EQ(propose_thresholds(v, k), oracle_thresholds(v, k));
  }
}

TEST(Thresholds, AllMidpointsWhenKEqualsRows) {
  EXPECT_EQ(propose_thresholds({4, 1, 3, 2}, 4),
            (std::vector<double>{1.5, 2.5, 3.5}));
  EXPECT_TRUE(propose_thresholds({5, 5, 5}, 3).empty());
  EXPECT_TRUE(propose_thresholds({1}, 3).empty());
}

TEST(SplitGain, FormulaWithHalfAndGamma) {
  const double v = split_gain(-1.0, 0.5, 2.0, 0.75, 1.0, 0.1);
  EXPECT_DOUBLE_EQ(v, 0.5 * (1.0 / 1.5 + 4.0 / 1.75 - 1.0 / 2.25) - 0.1);
}

TEST(BuildTree, ZeroGradientsGiveOneZeroLeaf) {
  const PlainDataset d = random_dataset(3, 20, 3, 5);
  const std::vector<double> g(20, 0.0), h(20, 0.25);
  BoostParams p;
  const PlainTree t = build_tree(g, h, d.columns, {0, 1, 2}, p, all_rows(20));
  ASSERT_EQ(t.nodes.size(), 1u);
  EXPECT_TRUE(t.nodes[0].leaf);
  EXPECT_EQ(t.nodes[0].weight, 0.0);
}

TEST(BuildTree, FourRowExampleSplitsBetweenTwoAndThree) {
  const PlainDataset d = four_row_dataset();
  const GradPair gh = gradients(d.labels, std::vector<double>(4, 0.0));
  BoostParams p;
  p.max_depth = 1;
  p.lambda = 1.0;
  p.n_candidates = 4;
  const PlainTree t = build_tree(gh.g, gh.h, d.columns, {0}, p, all_rows(4));
  ASSERT_FALSE(t.nodes[0].leaf);
  EXPECT_DOUBLE_EQ(t.nodes[0].threshold, 2.5);
  EXPECT_EQ(route(t, d.columns, 1), t.nodes[0].left);
  EXPECT_EQ(route(t, d.columns, 2), t.nodes[0].right);
}

TEST(BuildTree, TraceGainsEqualBruteForce) {
  const PlainDataset d = random_dataset(4, 20, 3, 6);
  const GradPair gh = gradients(d.labels, std::vector<double>(20, 0.3));
  BoostParams p;
  p.max_depth = 3;
  p.n_candidates = 5;
  p.gamma = 0.01;
  std::vector<NodeTrace> trace;
  build_tree(gh.g, gh.h, d.columns, {0, 1, 2}, p, all_rows(20), &trace);
  ASSERT_FALSE(trace.empty());
  for (const NodeTrace& nt : trace) {
    double G = 0, H = 0;
    for (std::size_t i : nt.instances) {
      G += gh.g[i];
      H += gh.h[i];
    }
    for (const CandidateGain& cg : nt.candidates) {
      double gl = 0, hl = 0;
      for (std::size_t i : nt.instances) {
        if (d.columns[cg.feature][i] < cg.threshold) {
          gl += gh.g[i];
          hl += gh.h[i];
        }
      }
      const double want = 0.5 * (gl * gl / (hl + p.lambda) +
                                 (G - gl) * (G - gl) / (H - hl + p.lambda) -
                                 G * G / (H + p.lambda)) -
                          p.gamma;
      EXPECT_NEAR(cg.gain, want, 1e-12);
    }
  }
}

// Exhaustive: with K = M every midpoint is a candidate, and the chosen root
// split maximizes the gain over all of them (earliest on ties).
TEST(BuildTree, RootSplitMaximizesExhaustiveGain) {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    RandomSource rng(seed, "exhaustive");
    const std::size_t m = 4 + rng.index(29);
    const PlainDataset d = random_dataset(seed + 100, m, 3, 7);
    std::vector<double> pred(m);
    for (double& v : pred) v = (rng.uniform01() - 0.5) * 2;
    const GradPair gh = gradients(d.labels, pred);
    BoostParams p;
    p.max_depth = 1;
    p.n_candidates = static_cast<int>(m);
    std::vector<NodeTrace> trace;
    const PlainTree t =
        build_tree(gh.g, gh.h, d.columns, {0, 1, 2}, p, all_rows(m), &trace);
    const double G = std::accumulate(gh.g.begin(), gh.g.end(), 0.0);
    const double H = std::accumulate(gh.h.begin(), gh.h.end(), 0.0);
    double best = -1e300;
    int best_f = -1;
    double best_t = 0;
    for (int f = 0; f < 3; ++f) {
      std::vector<double> vals = d.columns[f];
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      for (std::size_t a = 0; a + 1 < vals.size(); ++a) {
        const double thr = (vals[a] + vals[a + 1]) / 2;
        double gl = 0, hl = 0;
        for (std::size_t i = 0; i < m; ++i) {
          if (d.columns[f][i] < thr) {
            gl += gh.g[i];
            hl += gh.h[i];
          }
        }
        const double gain = split_gain(gl, hl, G - gl, H - hl, p.lambda, 0);
        if (gain > best + 1e-12) {
          best = gain;
          best_f = f;
          best_t = thr;
        }
      }
    }
    if (best > 0) {
      ASSERT_FALSE(t.nodes[0].leaf) << seed;
      EXPECT_NEAR(trace[0].candidates[trace[0].best].gain, best, 1e-12);
      EXPECT_EQ(t.nodes[0].feature, best_f) << seed;
      EXPECT_DOUBLE_EQ(t.nodes[0].threshold, best_t) << seed;
    } else {
      EXPECT_TRUE(t.nodes[0].leaf);
    }
  }
}

TEST(BuildTree, LeafWeightMinimizesSecondOrderObjective) {
  const PlainDataset d = random_dataset(5, 30, 2, 4);
  const GradPair gh = gradients(d.labels, std::vector<double>(30, 0.1));
  BoostParams p;
  p.eta = 1.0;
  p.max_depth = 2;
  std::vector<NodeTrace> trace;
  const PlainTree t =
      build_tree(gh.g, gh.h, d.columns, {0, 1}, p, all_rows(30), &trace);
  for (const NodeTrace& nt : trace) {
    if (!nt.leaf) continue;
    const double w = t.nodes[nt.node].weight;
    auto obj = [&](double x) {
      return nt.g_sum * x + 0.5 * (nt.h_sum + p.lambda) * x * x;
    };
    EXPECT_LT(obj(w), obj(w + 1e-3));
    EXPECT_LT(obj(w), obj(w - 1e-3));
    EXPECT_NEAR(w, -nt.g_sum / (nt.h_sum + p.lambda), 1e-12);
  }
}

TEST(BuildTree, RespectsDepthAndPartitions) {
  const PlainDataset d = random_dataset(6, 64, 4, 8);
  const GradPair gh = gradients(d.labels, std::vector<double>(64, 0.0));
  BoostParams p;
  p.max_depth = 3;
  std::vector<NodeTrace> trace;
  const PlainTree t =
      build_tree(gh.g, gh.h, d.columns, {0, 1, 2, 3}, p, all_rows(64), &trace);
  std::map<int, const NodeTrace*> by_node;
  for (const NodeTrace& nt : trace) by_node[nt.node] = &nt;
  for (std::size_t id = 0; id < t.nodes.size(); ++id) {
    const auto& n = t.nodes[id];
    EXPECT_LE(n.depth, 3);
    if (n.leaf) continue;
    std::vector<std::size_t> joined = by_node[n.left]->instances;
    const auto& r = by_node[n.right]->instances;
    EXPECT_FALSE(joined.empty());
    EXPECT_FALSE(r.empty());
    joined.insert(joined.end(), r.begin(), r.end());
    std::sort(joined.begin(), joined.end());
    EXPECT_EQ(joined, by_node[static_cast<int>(id)]->instances);
  }
}

TEST(Predict, SingleLeafGivesItsWeight) {
  PlainTree t;
  t.nodes.push_back({});
  t.nodes[0].weight = 0.7;
  const Columns cols = {{1, 2, 3}};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(predict_tree(t, cols, i), 0.7);
}

TEST(Lbp, FirstTreeReducesLossOnFourRows) {
  const PlainDataset d = four_row_dataset();
  BoostParams p;
  p.max_depth = 1;
  p.n_candidates = 4;
  const LbpResult r = lbp_xgb_train(d.columns, d.labels, p, all_rows(4));
  EXPECT_DOUBLE_EQ(r.base_score, 0.0);
  const std::vector<double> f0(4, r.base_score);
  EXPECT_LT(logloss(d.labels, r.preds), logloss(d.labels, f0));
}

TEST(Sampling, RowsAreSortedDistinctAndSeeded) {
  const auto a = sample_rows(1, 2, 100, 0.8);
  EXPECT_EQ(a.size(), 80u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
  EXPECT_EQ(a, sample_rows(1, 2, 100, 0.8));
  EXPECT_NE(a, sample_rows(1, 3, 100, 0.8));
  EXPECT_EQ(sample_rows(1, 2, 10, 1.0).size(), 10u);
  EXPECT_EQ(sample_rows(1, 2, 10, 0.01).size(), 2u);
  const auto f = sample_features(1, 2, 10, 0.5);
  EXPECT_EQ(f.size(), 5u);
  EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
}

TEST(Metrics, AccuracyAndLogloss) {
  EXPECT_DOUBLE_EQ(accuracy({1, 0, 1}, {0.5, -1, -0.1}), 2.0 / 3.0);
  EXPECT_NEAR(logloss({1, 0}, {0, 0}), std::log(2.0), 1e-12);
}

TEST(BoostParams, ValidateRejectsBadValues) {
  BoostParams p;
  EXPECT_NO_THROW(p.validate());
  for (auto mutate : std::vector<std::function<void(BoostParams&)>>{
           [](BoostParams& b) { b.eta = 0; },
           [](BoostParams& b) { b.eta = 1.5; },
           [](BoostParams& b) { b.lambda = -1; },
           [](BoostParams& b) { b.gamma = -1; },
           [](BoostParams& b) { b.rounds = 0; },
           [](BoostParams& b) { b.subsample_rows = 0; },
           [](BoostParams& b) { b.n_candidates = 0; }}) {
    BoostParams q;
    mutate(q);
    EXPECT_THROW(q.validate(), ConfigError);
  }
  p.bucket_size = 10;
  EXPECT_EQ(p.candidate_count(95), 10);
  p.bucket_size = 0;
  EXPECT_EQ(p.candidate_count(95), 16);
}

TEST(Booster, LossIsMonotoneWithFullSampling) {
  const PlainDataset d = random_dataset(7, 120, 4, 10);
  BoostParams p;
  p.subsample_rows = 1.0;
  p.gamma = 0.0;
  p.rounds = 15;
  PlainBooster b(d, {0}, p, 9, Link::kExact);
  double prev = logloss(d.labels,
                        std::vector<double>(120, compute_base_score(d.labels)));
  for (int t = 0; t < 15; ++t) {
    b.step();
    const double now = logloss(d.labels, b.preds());
    EXPECT_LE(now, prev + 1e-12) << "round " << t + 1;
    prev = now;
  }
}

TEST(Booster, ModelPredictionsMatchTrackedPredictions) {
  const PlainDataset d = random_dataset(8, 50, 3, 6);
  BoostParams p;
  PlainBooster b(d, {1}, p, 3, Link::kCubic);
  for (int t = 0; t < 5; ++t) b.step();
  const PlainModel m = b.model();
  ASSERT_EQ(m.trees.size(), 5u);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_NEAR(predict_model(m, d.columns, i), b.preds()[i], 1e-12);
  }
  // Round 1 only uses the LBP column.
  for (const auto& n : m.trees[0].nodes) {
    if (!n.leaf) EXPECT_EQ(n.feature, 1);
  }
}

}  // namespace
}  // namespace ssxgb
