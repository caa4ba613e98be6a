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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ssxgb/errors.h"
#include "ssxgb/random.h"

namespace ssxgb {

void BoostParams::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must be in (0, 1]");
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (gamma < 0.0) throw ConfigError("gamma must be >= 0");
  if (max_depth < 0) throw ConfigError("max_depth must be >= 0");
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (!(subsample_rows > 0.0 && subsample_rows <= 1.0)) {
    throw ConfigError("subsample_rows must be in (0, 1]");
  }
  if (!(subsample_cols > 0.0 && subsample_cols <= 1.0)) {
    throw ConfigError("subsample_cols must be in (0, 1]");
  }
  if (bucket_size < 0) throw ConfigError("bucket_size must be >= 0");
  if (bucket_size == 0 && n_candidates < 1) {
    throw ConfigError("n_candidates must be >= 1");
  }
}

int BoostParams::candidate_count(std::size_t n) const {
  if (bucket_size > 0) {
    return static_cast<int>((n + bucket_size - 1) / bucket_size);
  }
  return n_candidates;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double sigmoid_cubic(double x) {
  return kSigmoidC0 + kSigmoidC1 * x + kSigmoidC3 * x * x * x;
}

double link(double x, Link l) {
  return l == Link::kExact ? sigmoid(x) : sigmoid_cubic(x);
}

double compute_base_score(const std::vector<double>& labels) {
  if (labels.empty()) throw std::invalid_argument("base score of no labels");
  double p = std::accumulate(labels.begin(), labels.end(), 0.0) /
             static_cast<double>(labels.size());
  p = std::clamp(p, 1e-5, 1.0 - 1e-5);
  return std::log(p / (1.0 - p));
}

GradPair gradients(const std::vector<double>& labels,
                   const std::vector<double>& preds, Link l) {
  if (labels.size() != preds.size()) {
    throw std::invalid_argument("labels and predictions differ in length");
  }
  GradPair out;
  out.g.resize(labels.size());
  out.h.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double s = link(preds[i], l);
    out.g[i] = s - labels[i];
    out.h[i] = s * (1.0 - s);
  }
  return out;
}

std::vector<double> propose_thresholds(std::vector<double> values, int k) {
  std::vector<double> out;
  const std::size_t n = values.size();
  if (n < 2 || k < 1) return out;
  std::sort(values.begin(), values.end());
  for (int i = 1; i <= k; ++i) {
    std::size_t c = static_cast<std::size_t>(
        (static_cast<uint64_t>(i) * n + k) / (static_cast<uint64_t>(k) + 1));
    c = std::clamp<std::size_t>(c, 1, n - 1);
    const double t = 0.5 * (values[c - 1] + values[c]);
    // Left side is {v < t}; it is empty when t does not exceed the minimum.
    if (!(t > values.front())) continue;
    if (!out.empty() && out.back() == t) continue;
    out.push_back(t);
  }
  return out;
}

double split_gain(double gl, double hl, double gr, double hr, double lambda,
                  double gamma) {
  const double g = gl + gr;
  const double h = hl + hr;
  return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) -
                g * g / (h + lambda)) -
         gamma;
}

namespace {

struct Builder {
  const std::vector<double>& g;
  const std::vector<double>& h;
  const Columns& columns;
  const std::vector<int>& features;
  const BoostParams& params;
  std::vector<NodeTrace>* trace;
  PlainTree tree;

  int build(const std::vector<std::size_t>& instances, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[id].depth = depth;
    NodeTrace nt;
    nt.node = id;
    nt.depth = depth;
    nt.instances = instances;
    for (std::size_t i : instances) {
      nt.g_sum += g[i];
      nt.h_sum += h[i];
    }
    const double big_g = nt.g_sum;
    const double big_h = nt.h_sum;

    if (depth < params.max_depth) {
      const int k = params.candidate_count(instances.size());
      for (int f : features) {
        const std::vector<double>& col = columns[f];
        std::vector<double> values;
        values.reserve(instances.size());
        for (std::size_t i : instances) values.push_back(col[i]);
        const std::vector<double> thresholds = propose_thresholds(values, k);
        for (std::size_t c = 0; c < thresholds.size(); ++c) {
          CandidateGain cg;
          cg.feature = f;
          cg.candidate = static_cast<int>(c);
          cg.threshold = thresholds[c];
          for (std::size_t i : instances) {
            if (col[i] < cg.threshold) {
              cg.gl += g[i];
              cg.hl += h[i];
            }
          }
          cg.gain = split_gain(cg.gl, cg.hl, big_g - cg.gl, big_h - cg.hl,
                               params.lambda, params.gamma);
          nt.candidates.push_back(cg);
        }
      }
      for (std::size_t c = 0; c < nt.candidates.size(); ++c) {
        if (nt.best < 0 || nt.candidates[c].gain > nt.candidates[nt.best].gain) {
          nt.best = static_cast<int>(c);
        }
      }
    }

    const bool split = nt.best >= 0 && nt.candidates[nt.best].gain > 0.0;
    nt.leaf = !split;
    if (!split) {
      tree.nodes[id].leaf = true;
      tree.nodes[id].weight = -big_g / (big_h + params.lambda) * params.eta;
      if (trace != nullptr) trace->push_back(std::move(nt));
      return id;
    }
    const CandidateGain best = nt.candidates[nt.best];
    std::vector<std::size_t> left, right;
    for (std::size_t i : instances) {
      (columns[best.feature][i] < best.threshold ? left : right).push_back(i);
    }
    if (trace != nullptr) trace->push_back(std::move(nt));
    tree.nodes[id].leaf = false;
    tree.nodes[id].feature = best.feature;
    tree.nodes[id].threshold = best.threshold;
    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }
};

}  // namespace

PlainTree build_tree(const std::vector<double>& g, const std::vector<double>& h,
                     const Columns& columns, const std::vector<int>& features,
                     const BoostParams& params,
                     const std::vector<std::size_t>& instances,
                     std::vector<NodeTrace>* trace) {
  if (instances.empty()) throw std::invalid_argument("empty instance set");
  Builder b{g, h, columns, features, params, trace, {}};
  b.tree.max_depth = params.max_depth;
  b.build(instances, 0);
  return std::move(b.tree);
}

int route(const PlainTree& tree, const Columns& columns, std::size_t row) {
  int id = 0;
  while (!tree.nodes[id].leaf) {
    const PlainTree::Node& n = tree.nodes[id];
    id = columns[n.feature][row] < n.threshold ? n.left : n.right;
  }
  return id;
}

double predict_tree(const PlainTree& tree, const Columns& columns,
                    std::size_t row) {
  return tree.nodes[route(tree, columns, row)].weight;
}

LbpResult lbp_xgb_train(const Columns& x_lbp, const std::vector<double>& y,
                        const BoostParams& params,
                        const std::vector<std::size_t>& instances) {
  LbpResult out;
  out.base_score = compute_base_score(y);
  out.preds.assign(y.size(), out.base_score);
  const GradPair gh = gradients(y, out.preds, Link::kExact);
  std::vector<int> features(x_lbp.size());
  std::iota(features.begin(), features.end(), 0);
  out.tree = build_tree(gh.g, gh.h, x_lbp, features, params, instances);
  for (std::size_t i = 0; i < y.size(); ++i) {
    out.preds[i] += predict_tree(out.tree, x_lbp, i);
  }
  return out;
}

std::vector<std::size_t> sample_rows(uint64_t seed, int round, std::size_t n,
                                     double rate) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  if (rate >= 1.0) return all;
  std::size_t keep = static_cast<std::size_t>(std::llround(rate * n));
  keep = std::clamp<std::size_t>(keep, std::min<std::size_t>(2, n), n);
  RandomSource rng(seed, "rows/" + std::to_string(round));
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < keep; ++i) {
    std::swap(all[i], all[i + rng.index(n - i)]);
  }
  all.resize(keep);
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<int> sample_features(uint64_t seed, int round, std::size_t d,
                                 double rate) {
  std::vector<int> all(d);
  std::iota(all.begin(), all.end(), 0);
  if (rate >= 1.0) return all;
  std::size_t keep = static_cast<std::size_t>(std::llround(rate * d));
  keep = std::clamp<std::size_t>(keep, std::min<std::size_t>(1, d), d);
  RandomSource rng(seed, "cols/" + std::to_string(round));
  for (std::size_t i = 0; i < keep; ++i) {
    std::swap(all[i], all[i + rng.index(d - i)]);
  }
  all.resize(keep);
  std::sort(all.begin(), all.end());
  return all;
}

double accuracy(const std::vector<double>& labels,
                const std::vector<double>& logits) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double pred = logits[i] >= 0.0 ? 1.0 : 0.0;
    if (pred == labels[i]) ++hit;
  }
  return labels.empty() ? 0.0 : static_cast<double>(hit) / labels.size();
}

double logloss(const std::vector<double>& labels,
               const std::vector<double>& logits) {
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(sigmoid(logits[i]), 1e-15, 1.0 - 1e-15);
    sum -= labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  return labels.empty() ? 0.0 : sum / labels.size();
}

PlainBooster::PlainBooster(const PlainDataset& data,
                           std::vector<int> lbp_features, BoostParams params,
                           uint64_t seed, Link later_link)
    : data_(data),
      lbp_features_(std::move(lbp_features)),
      params_(params),
      seed_(seed),
      later_link_(later_link) {
  params_.validate();
}

const PlainRound& PlainBooster::step() {
  const int t = rounds_done() + 1;
  const std::size_t n = data_.rows();
  const std::vector<std::size_t> rows =
      sample_rows(seed_, t, n, params_.subsample_rows);
  PlainRound rec;
  rec.round = t;
  if (t == 1) {
    Columns x_lbp;
    for (int f : lbp_features_) x_lbp.push_back(data_.columns[f]);
    std::vector<int> local(lbp_features_.size());
    std::iota(local.begin(), local.end(), 0);
    base_score_ = compute_base_score(data_.labels);
    preds_.assign(n, base_score_);
    const GradPair gh = gradients(data_.labels, preds_, Link::kExact);
    rec.tree =
        build_tree(gh.g, gh.h, x_lbp, local, params_, rows, &rec.trace);
    for (std::size_t i = 0; i < n; ++i) {
      preds_[i] += predict_tree(rec.tree, x_lbp, i);
    }
    // Report features by global id.
    for (PlainTree::Node& node : rec.tree.nodes) {
      if (!node.leaf) node.feature = lbp_features_[node.feature];
    }
    for (NodeTrace& nt : rec.trace) {
      for (CandidateGain& cg : nt.candidates) {
        cg.feature = lbp_features_[cg.feature];
      }
    }
  } else {
    const GradPair gh = gradients(data_.labels, preds_, later_link_);
    const std::vector<int> features =
        sample_features(seed_, t, data_.cols(), params_.subsample_cols);
    rec.tree = build_tree(gh.g, gh.h, data_.columns, features, params_, rows,
                          &rec.trace);
    for (std::size_t i = 0; i < n; ++i) {
      preds_[i] += predict_tree(rec.tree, data_.columns, i);
    }
  }
  rec.preds = preds_;
  history_.push_back(std::move(rec));
  return history_.back();
}

PlainModel PlainBooster::model() const {
  PlainModel m;
  m.base_score = base_score_;
  for (const PlainRound& r : history_) m.trees.push_back(r.tree);
  return m;
}

double predict_model(const PlainModel& model, const Columns& columns,
                     std::size_t row) {
  double out = model.base_score;
  for (const PlainTree& t : model.trees) out += predict_tree(t, columns, row);
  return out;
}

}  // namespace ssxgb
