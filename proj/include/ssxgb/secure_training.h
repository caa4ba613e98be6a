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

#ifndef SSXGB_SECURE_TRAINING_H_
#define SSXGB_SECURE_TRAINING_H_

// Secure boosting driven by Server C: the LBP builds the first tree in the
// clear on its own columns, every later tree is grown on joint-key
// ciphertexts.

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "ssxgb/federation.h"

namespace ssxgb {

struct SecureTree {
  struct Node {
    bool leaf = true;
    int owner = -1;      // participant index of an internal node
    int feature = -1;    // opaque label (j, k); k is -1 on the LBP tree
    int candidate = -1;
    int left = -1;
    int right = -1;
    int depth = 0;
    std::optional<ScaledCiphertext> weight;  // leaves only
    InstanceSpace instances;  // training rows routed here (C-side only)
  };
  std::vector<Node> nodes;  // preorder; nodes[0] is the root
};

struct TreeList {
  ScaledCiphertext base_score;
  std::vector<SecureTree> trees;
  FixedPointConfig fp;
  unsigned key_bits = 0;  // bit length of N
};

struct SplitTuple {
  int participant = 0;
  int feature = 0;
  int candidate = 0;
  ScaledCiphertext gl;
  ScaledCiphertext hl;
};

struct SplitOutcome {
  bool leaf = true;
  CandidateKey best;
  std::optional<ScaledCiphertext> weight;
  // Kept for inspection by tests.
  std::optional<ScaledCiphertext> cgain;
  std::map<CandidateKey, ScaledCiphertext> gains;
};

// Per-row encrypted g and h for the listed rows, using the cubic sigmoid.
// y is at scale f, yhat at any scale s; g comes out at 3s + f and h at
// 2(3s + f).
struct EncryptedGradients {
  std::vector<std::size_t> rows;
  std::vector<ScaledCiphertext> g;
  std::vector<ScaledCiphertext> h;
};
EncryptedGradients secure_gradients(ServerC& c,
                                    const std::vector<ScaledCiphertext>& y,
                                    const std::vector<ScaledCiphertext>& yhat,
                                    const std::vector<std::size_t>& rows);

// The node decision at C given the node sums and the participants' tuples.
SplitOutcome ssplit_node(ServerC& c, const ScaledCiphertext& big_g,
                         const ScaledCiphertext& big_h,
                         const std::vector<SplitTuple>& tuples,
                         const BoostParams& params);

// Encrypted -eta G / (H + lambda) at the quotient scale.
ScaledCiphertext leaf_weight(ServerC& c, const ScaledCiphertext& big_g,
                             const ScaledCiphertext& big_h,
                             const BoostParams& params);

class SecureTrainer {
 public:
  explicit SecureTrainer(Federation& fed);

  // Round 1 is the LBP round; later rounds grow one secure tree each.
  void run_round();
  int rounds_done() const { return rounds_done_; }

  const TreeList& model() const { return model_; }
  const std::vector<ScaledCiphertext>& yhat() const { return yhat_; }
  const std::vector<ScaledCiphertext>& labels() const { return y_; }
  // Split outcomes of the last secure tree, preorder over internal nodes and
  // leaves alike (tests).
  const std::vector<SplitOutcome>& last_outcomes() const { return outcomes_; }

 private:
  void lbp_round();
  void secure_round(int t);
  int build_node(SecureTree& tree, int tree_id, const InstanceSpace& sample,
                 const InstanceSpace& route, int depth,
                 const EncryptedGradients& gh,
                 const std::map<std::size_t, std::size_t>& slot);
  std::vector<SplitTuple> collect_tuples(int tree_id, int node,
                                         const InstanceSpace& sample);

  Federation& fed_;
  ServerC& c_;
  int rounds_done_ = 0;
  int pred_scale_ = 0;
  TreeList model_;
  std::vector<ScaledCiphertext> y_;
  std::vector<ScaledCiphertext> yhat_;
  std::vector<SplitOutcome> outcomes_;
};

using RoundCallback = std::function<void(int round, SecureTrainer&)>;
TreeList ssxgb_train(Federation& fed, const RoundCallback& on_round = {});

}  // namespace ssxgb

#endif  // SSXGB_SECURE_TRAINING_H_
