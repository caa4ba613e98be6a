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

#ifndef SSXGB_XGB_PLAIN_H_
#define SSXGB_XGB_PLAIN_H_

// Plaintext gradient tree boosting for binary logistic loss. Builds the LBP's
// first tree and serves as the reference the secure pipeline is checked
// against.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ssxgb {

// Column-major feature storage: columns[j][i] is feature j of row i.
using Columns = std::vector<std::vector<double>>;

struct PlainDataset {
  Columns columns;
  std::vector<double> labels;
  std::vector<std::string> feature_names;

  std::size_t rows() const { return labels.size(); }
  std::size_t cols() const { return columns.size(); }
};

struct BoostParams {
  double eta = 0.08;
  double lambda = 1.0;
  double gamma = 0.0;
  int max_depth = 4;
  int rounds = 20;
  double subsample_rows = 0.8;
  double subsample_cols = 1.0;
  // Samples per candidate bucket q; when positive, a node with n rows gets
  // ceil(n / q) candidates per feature. Otherwise n_candidates is used.
  int bucket_size = 0;
  int n_candidates = 16;

  // Throws ConfigError.
  void validate() const;
  int candidate_count(std::size_t n) const;
};

enum class Link {
  kExact,  // logistic sigmoid
  kCubic,  // the cubic the secure pipeline evaluates on ciphertexts
};

// Least-squares cubic fit of the sigmoid on [-8, 8] (c2 is zero by symmetry).
inline constexpr double kSigmoidC0 = 0.5;
inline constexpr double kSigmoidC1 = 0.15012041327351837;
inline constexpr double kSigmoidC3 = -0.0015930174072199167;

double sigmoid(double x);
double sigmoid_cubic(double x);
double link(double x, Link l);

// logit of the clipped label mean. Throws std::invalid_argument when empty.
double compute_base_score(const std::vector<double>& labels);

struct GradPair {
  std::vector<double> g;
  std::vector<double> h;
};
GradPair gradients(const std::vector<double>& labels,
                   const std::vector<double>& preds, Link l = Link::kExact);

// Equal-frequency thresholds for one feature over a node's values. Cut
// positions c_k = ceil(k n / (K + 1)), k = 1..K, clamped to [1, n - 1]; each
// threshold is the midpoint of the sorted values at c - 1 and c. Thresholds
// that repeat or leave a side empty are dropped.
std::vector<double> propose_thresholds(std::vector<double> values, int k);

// Split score: half the child-minus-parent structure score, less gamma.
double split_gain(double gl, double hl, double gr, double hr, double lambda,
                  double gamma);

struct PlainTree {
  struct Node {
    bool leaf = true;
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double weight = 0.0;
    int depth = 0;
  };
  // Preorder, left subtree first; nodes[0] is the root.
  std::vector<Node> nodes;
  int max_depth = 0;
};

struct CandidateGain {
  int feature = 0;
  int candidate = 0;
  double threshold = 0.0;
  double gl = 0.0, hl = 0.0;
  double gain = 0.0;
};

struct NodeTrace {
  int node = 0;
  int depth = 0;
  std::vector<std::size_t> instances;
  double g_sum = 0.0, h_sum = 0.0;
  std::vector<CandidateGain> candidates;
  bool leaf = true;
  int best = -1;  // index into candidates
};

// Greedy depth-first tree over the rows in `instances` using the listed
// feature ids. Route LEFT iff value < threshold. Ties on gain keep the lowest
// (feature, candidate).
PlainTree build_tree(const std::vector<double>& g, const std::vector<double>& h,
                     const Columns& columns, const std::vector<int>& features,
                     const BoostParams& params,
                     const std::vector<std::size_t>& instances,
                     std::vector<NodeTrace>* trace = nullptr);

// Index of the leaf that `row` reaches.
int route(const PlainTree& tree, const Columns& columns, std::size_t row);
double predict_tree(const PlainTree& tree, const Columns& columns,
                    std::size_t row);

struct LbpResult {
  double base_score = 0.0;
  PlainTree tree;
  std::vector<double> preds;
};
// First round on the LBP's own columns with the exact sigmoid.
LbpResult lbp_xgb_train(const Columns& x_lbp, const std::vector<double>& y,
                        const BoostParams& params,
                        const std::vector<std::size_t>& instances);

// Per-round subsampling shared by the oracle and the secure pipeline. Sorted
// output; a rate of 1 or more keeps everything.
std::vector<std::size_t> sample_rows(uint64_t seed, int round, std::size_t n,
                                     double rate);
std::vector<int> sample_features(uint64_t seed, int round, std::size_t d,
                                 double rate);

double accuracy(const std::vector<double>& labels,
                const std::vector<double>& logits);
double logloss(const std::vector<double>& labels,
               const std::vector<double>& logits);

// Multi-round reference booster. Round 1 is the LBP tree over lbp_features;
// later rounds use every feature with the chosen link for the gradients.
struct PlainRound {
  int round = 0;
  PlainTree tree;
  std::vector<NodeTrace> trace;
  std::vector<double> preds;  // after this round
};

struct PlainModel {
  double base_score = 0.0;
  std::vector<PlainTree> trees;
};

class PlainBooster {
 public:
  PlainBooster(const PlainDataset& data, std::vector<int> lbp_features,
               BoostParams params, uint64_t seed, Link later_link);

  // Runs one more round and returns its record.
  const PlainRound& step();
  int rounds_done() const { return static_cast<int>(history_.size()); }
  const std::vector<double>& preds() const { return preds_; }
  const std::vector<PlainRound>& history() const { return history_; }
  PlainModel model() const;

 private:
  const PlainDataset& data_;
  std::vector<int> lbp_features_;
  BoostParams params_;
  uint64_t seed_;
  Link later_link_;
  double base_score_ = 0.0;
  std::vector<double> preds_;
  std::vector<PlainRound> history_;
};

double predict_model(const PlainModel& model, const Columns& columns,
                     std::size_t row);

}  // namespace ssxgb

#endif  // SSXGB_XGB_PLAIN_H_
