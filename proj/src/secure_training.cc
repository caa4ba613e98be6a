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

#include "ssxgb/secure_training.h"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "ssxgb/errors.h"

namespace ssxgb {

namespace {

// Extra precision for the sigmoid coefficients so that their rounding stays
// well under the gradient tolerance at |yhat| <= 8.
constexpr int kCoefficientExtraBits = 16;

BigInt signed_fixed(double v, int f, const FixedPointConfig& fp,
                    const BigInt& n) {
  return to_signed(encode(v, f, n, fp.bound_exp), n);
}

ScaledCiphertext sum_over(ServerC& c, const std::vector<ScaledCiphertext>& v,
                          const InstanceSpace& rows,
                          const std::map<std::size_t, std::size_t>& slot,
                          int scale) {
  std::optional<ScaledCiphertext> acc;
  for (std::size_t i : rows) {
    const ScaledCiphertext& x = v[slot.at(i)];
    acc = acc ? c.add(*acc, x) : x;
  }
  return acc ? *acc : c.encrypt_raw(0, scale);
}

}  // namespace

EncryptedGradients secure_gradients(ServerC& c,
                                    const std::vector<ScaledCiphertext>& y,
                                    const std::vector<ScaledCiphertext>& yhat,
                                    const std::vector<std::size_t>& rows) {
  const FixedPointConfig& fp = c.fixed_point();
  const BigInt& n = c.pp().n;
  const int cf = fp.scale_exp + kCoefficientExtraBits;
  EncryptedGradients out;
  out.rows = rows;
  for (std::size_t r : rows) {
    const ScaledCiphertext& x = yhat.at(r);
    const int sig_scale = 3 * x.scale + cf;
    const ScaledCiphertext sq = c.mult(x, x);
    const ScaledCiphertext cube = c.mult(sq, x);
    const ScaledCiphertext t1 = c.upscale(
        c.exp(x, signed_fixed(kSigmoidC1, cf, fp, n), cf), sig_scale);
    const ScaledCiphertext t3 =
        c.exp(cube, signed_fixed(kSigmoidC3, cf, fp, n), cf);
    const ScaledCiphertext t0 = c.encrypt(kSigmoidC0, sig_scale);
    const ScaledCiphertext sig = c.add(c.add(t0, t1), t3);
    out.g.push_back(c.sub(sig, c.upscale(y.at(r), sig_scale)));
    const ScaledCiphertext one_minus = c.sub(c.encrypt(1.0, sig_scale), sig);
    out.h.push_back(c.mult(sig, one_minus));
  }
  return out;
}

ScaledCiphertext leaf_weight(ServerC& c, const ScaledCiphertext& big_g,
                             const ScaledCiphertext& big_h,
                             const BoostParams& params) {
  const FixedPointConfig& fp = c.fixed_point();
  const int f = fp.scale_exp;
  // -eta folded into the numerator before dividing.
  const ScaledCiphertext num =
      c.exp(big_g, signed_fixed(-params.eta, f, fp, c.pp().n), f);
  const ScaledCiphertext den =
      c.add(big_h, c.encrypt(params.lambda, big_h.scale));
  return c.div(num, den);
}

SplitOutcome ssplit_node(ServerC& c, const ScaledCiphertext& big_g,
                         const ScaledCiphertext& big_h,
                         const std::vector<SplitTuple>& tuples,
                         const BoostParams& params) {
  SplitOutcome out;
  if (tuples.empty()) {
    out.weight = leaf_weight(c, big_g, big_h, params);
    return out;
  }
  const ScaledCiphertext lambda = c.encrypt(params.lambda, big_h.scale);
  const ScaledCiphertext cgain =
      c.div(c.mult(big_g, big_g), c.add(big_h, lambda));
  out.cgain = cgain;
  for (const SplitTuple& t : tuples) {
    const ScaledCiphertext gr = c.sub(big_g, t.gl);
    const ScaledCiphertext hr = c.sub(big_h, t.hl);
    const ScaledCiphertext lgain =
        c.div(c.mult(t.gl, t.gl), c.add(t.hl, lambda));
    const ScaledCiphertext rgain = c.div(c.mult(gr, gr), c.add(hr, lambda));
    out.gains[{t.participant, t.feature, t.candidate}] =
        c.sub(c.add(lgain, rgain), cgain);
  }
  out.best = c.sargmax(out.gains);
  // The encrypted gain is 2 (split_gain + gamma); split iff it beats 2 gamma.
  const ScaledCiphertext floor =
      c.encrypt(2.0 * params.gamma, c.fixed_point().quotient_scale_exp);
  out.leaf = !c.lgt(floor, out.gains.at(out.best));
  if (out.leaf) out.weight = leaf_weight(c, big_g, big_h, params);
  return out;
}

SecureTrainer::SecureTrainer(Federation& fed) : fed_(fed), c_(fed.c()) {
  const FixedPointConfig& fp = fed.context().fp;
  pred_scale_ = std::max(fp.scale_exp, fp.quotient_scale_exp);
  model_.fp = fp;
  model_.key_bits = static_cast<unsigned>(bit_length(fed.pp().n));
}

void SecureTrainer::run_round() {
  const int t = rounds_done_ + 1;
  if (t == 1) {
    lbp_round();
  } else {
    secure_round(t);
  }
  rounds_done_ = t;
}

void SecureTrainer::lbp_round() {
  c_.set_round(1);
  const RunContext& ctx = fed_.context();
  const std::size_t n = fed_.data().rows;
  const EntityId lbp = participant_id(fed_.lbp());
  Message req;
  req.protocol = proto::kLbpRequest;
  req.session = fed_.bus().next_session();
  req.round = 1;
  for (std::size_t i :
       sample_rows(ctx.seed, 1, n, ctx.params.subsample_rows)) {
    req.integers.push_back(static_cast<int64_t>(i));
  }
  fed_.bus().send(kServerC, lbp, std::move(req));
  fed_.bus().run_until_idle();
  const Envelope up = c_.take(lbp, proto::kLbpUpload);
  const auto& ints = up.message.integers;
  const auto& cts = up.message.ciphertexts;
  const std::size_t nodes = static_cast<std::size_t>(ints.at(0));
  if (ints.size() != 1 + 4 * nodes) throw ProtocolError("lbp_upload: layout");

  std::size_t next = 0;
  auto rekey = [&](int scale) {
    return ScaledCiphertext{c_.to_joint(cts.at(next++)), scale};
  };
  model_.base_score = rekey(pred_scale_);
  SecureTree tree;
  for (std::size_t i = 0; i < nodes; ++i) {
    SecureTree::Node node;
    node.leaf = ints[1 + 4 * i] != 0;
    node.left = static_cast<int>(ints[2 + 4 * i]);
    node.right = static_cast<int>(ints[3 + 4 * i]);
    node.feature = static_cast<int>(ints[4 + 4 * i]);
    if (node.leaf) {
      node.weight = rekey(pred_scale_);
    } else {
      node.owner = fed_.lbp();
    }
    tree.nodes.push_back(std::move(node));
  }
  for (SecureTree::Node& node : tree.nodes) {
    if (node.leaf) continue;
    tree.nodes[node.left].depth = node.depth + 1;
    tree.nodes[node.right].depth = node.depth + 1;
  }
  if (cts.size() != next + 2 * n) throw ProtocolError("lbp_upload: rows");
  y_.clear();
  yhat_.clear();
  for (std::size_t i = 0; i < n; ++i) y_.push_back(rekey(ctx.fp.scale_exp));
  for (std::size_t i = 0; i < n; ++i) yhat_.push_back(rekey(pred_scale_));
  model_.trees.push_back(std::move(tree));
}

std::vector<SplitTuple> SecureTrainer::collect_tuples(
    int tree_id, int node, const InstanceSpace& sample) {
  const uint32_t round = c_.round();
  for (int p = 0; p < fed_.n_participants(); ++p) {
    Message req;
    req.protocol = proto::kSplitCandidates;
    req.session = fed_.bus().next_session();
    req.round = round;
    req.integers = {tree_id, node};
    for (std::size_t i : sample) req.integers.push_back(static_cast<int64_t>(i));
    fed_.bus().send(kServerC, participant_id(p), std::move(req));
  }
  fed_.bus().run_until_idle();
  std::vector<SplitTuple> tuples;
  for (int p = 0; p < fed_.n_participants(); ++p) {
    const Envelope env = c_.take(participant_id(p), proto::kSplitCandidates);
    const auto& ints = env.message.integers;
    const auto& cts = env.message.ciphertexts;
    const std::size_t count = (ints.size() - 2) / 2;
    if (cts.size() != 2 * count) throw ProtocolError("split_candidates layout");
    for (std::size_t c = 0; c < count; ++c) {
      SplitTuple t;
      t.participant = p;
      t.feature = static_cast<int>(ints[2 + 2 * c]);
      t.candidate = static_cast<int>(ints[3 + 2 * c]);
      t.gl = {cts[2 * c], 0};
      t.hl = {cts[2 * c + 1], 0};
      tuples.push_back(std::move(t));
    }
  }
  return tuples;
}

int SecureTrainer::build_node(SecureTree& tree, int tree_id,
                              const InstanceSpace& sample,
                              const InstanceSpace& route, int depth,
                              const EncryptedGradients& gh,
                              const std::map<std::size_t, std::size_t>& slot) {
  const BoostParams& params = fed_.context().params;
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes[id].depth = depth;
  const std::size_t out_index = outcomes_.size();
  outcomes_.emplace_back();

  const int g_scale = gh.g.empty() ? 0 : gh.g.front().scale;
  const int h_scale = gh.h.empty() ? 0 : gh.h.front().scale;
  const ScaledCiphertext big_g = sum_over(c_, gh.g, sample, slot, g_scale);
  const ScaledCiphertext big_h = sum_over(c_, gh.h, sample, slot, h_scale);

  SplitOutcome outcome;
  if (depth < params.max_depth && sample.size() >= 2) {
    std::vector<SplitTuple> tuples = collect_tuples(tree_id, id, sample);
    for (SplitTuple& t : tuples) {
      t.gl.scale = g_scale;
      t.hl.scale = h_scale;
    }
    outcome = ssplit_node(c_, big_g, big_h, tuples, params);
  } else {
    outcome.weight = leaf_weight(c_, big_g, big_h, params);
  }
  outcomes_[out_index] = outcome;

  if (outcome.leaf) {
    tree.nodes[id].weight = outcome.weight;
    tree.nodes[id].instances = route;
    return id;
  }

  const int owner = outcome.best.participant;
  Message req;
  req.protocol = proto::kSplitDecision;
  req.session = fed_.bus().next_session();
  req.round = c_.round();
  req.integers = {tree_id, id, outcome.best.feature, outcome.best.candidate};
  for (std::size_t i : route) req.integers.push_back(static_cast<int64_t>(i));
  fed_.bus().send(kServerC, participant_id(owner), std::move(req));
  fed_.bus().run_until_idle();
  const Envelope reply = c_.take(participant_id(owner), proto::kSplitDecision);
  const InstanceSpace left_route(reply.message.integers.begin() + 2,
                                 reply.message.integers.end());
  InstanceSpace right_route;
  std::set_difference(route.begin(), route.end(), left_route.begin(),
                      left_route.end(), std::back_inserter(right_route));
  InstanceSpace left_sample, right_sample;
  std::set_intersection(sample.begin(), sample.end(), left_route.begin(),
                        left_route.end(), std::back_inserter(left_sample));
  std::set_difference(sample.begin(), sample.end(), left_sample.begin(),
                      left_sample.end(), std::back_inserter(right_sample));

  tree.nodes[id].leaf = false;
  tree.nodes[id].owner = owner;
  tree.nodes[id].feature = outcome.best.feature;
  tree.nodes[id].candidate = outcome.best.candidate;
  tree.nodes[id].instances = route;
  const int l =
      build_node(tree, tree_id, left_sample, left_route, depth + 1, gh, slot);
  const int r =
      build_node(tree, tree_id, right_sample, right_route, depth + 1, gh, slot);
  tree.nodes[id].left = l;
  tree.nodes[id].right = r;
  return id;
}

void SecureTrainer::secure_round(int t) {
  c_.set_round(static_cast<uint32_t>(t));
  const RunContext& ctx = fed_.context();
  const std::size_t n = fed_.data().rows;
  const InstanceSpace rows =
      sample_rows(ctx.seed, t, n, ctx.params.subsample_rows);
  const EncryptedGradients gh = secure_gradients(c_, y_, yhat_, rows);
  std::map<std::size_t, std::size_t> slot;
  for (std::size_t s = 0; s < rows.size(); ++s) slot[rows[s]] = s;

  for (int p = 0; p < fed_.n_participants(); ++p) {
    Message m;
    m.protocol = proto::kGradients;
    m.session = fed_.bus().next_session();
    m.round = static_cast<uint32_t>(t);
    m.integers = {gh.g.front().scale, gh.h.front().scale};
    for (std::size_t s = 0; s < rows.size(); ++s) {
      m.integers.push_back(static_cast<int64_t>(rows[s]));
      m.ciphertexts.push_back(gh.g[s].ct);
      m.ciphertexts.push_back(gh.h[s].ct);
    }
    fed_.bus().send(kServerC, participant_id(p), std::move(m));
  }
  fed_.bus().run_until_idle();

  InstanceSpace all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  SecureTree tree;
  outcomes_.clear();
  build_node(tree, t - 1, rows, all, 0, gh, slot);

  // Every training row sits in exactly one leaf's instance space.
  std::vector<int> covered(n, 0);
  for (const SecureTree::Node& node : tree.nodes) {
    if (!node.leaf) continue;
    const ScaledCiphertext w = c_.upscale(*node.weight, pred_scale_);
    for (std::size_t i : node.instances) {
      yhat_[i] = c_.add(yhat_[i], w);
      ++covered[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (covered[i] != 1) {
      throw ProtocolError("row " + std::to_string(i) +
                          " is not covered by exactly one leaf");
    }
  }
  model_.trees.push_back(std::move(tree));
}

TreeList ssxgb_train(Federation& fed, const RoundCallback& on_round) {
  SecureTrainer trainer(fed);
  for (int t = 1; t <= fed.context().params.rounds; ++t) {
    trainer.run_round();
    if (on_round) on_round(t, trainer);
  }
  return trainer.model();
}

}  // namespace ssxgb
