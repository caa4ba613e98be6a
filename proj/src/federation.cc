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

#include "ssxgb/federation.h"

#include <algorithm>

#include "ssxgb/errors.h"

namespace ssxgb {

EntityId participant_id(int index) { return "P" + std::to_string(index); }

std::pair<InstanceSpace, InstanceSpace> partition_instances(
    const std::vector<double>& values, const InstanceSpace& node,
    double threshold) {
  std::pair<InstanceSpace, InstanceSpace> out;
  for (std::size_t i : node) {
    (values.at(i) < threshold ? out.first : out.second).push_back(i);
  }
  return out;
}

namespace {

uint64_t ceil_div(uint64_t n, uint64_t q) {
  if (q == 0) throw ConfigError("bucket size q must be positive");
  return (n + q - 1) / q;
}

}  // namespace

uint64_t expected_cost_participant(uint64_t zeta, uint64_t d, uint64_t n,
                                   uint64_t q) {
  return 2 * zeta * d * ceil_div(n, q);
}

uint64_t expected_cost_servers(uint64_t zeta, uint64_t n, uint64_t q,
                               uint64_t big_d) {
  return 12 * zeta + 3 * zeta * ceil_div(n, q) * big_d;
}

PartitionedData partition_columns(const PlainDataset& data, int participants,
                                  int lbp) {
  const std::size_t d = data.cols();
  if (participants < 1) throw ConfigError("need at least one participant");
  if (static_cast<std::size_t>(participants) > d) {
    throw ConfigError("more participants (" + std::to_string(participants) +
                      ") than features (" + std::to_string(d) + ")");
  }
  if (lbp < 0 || lbp >= participants) throw ConfigError("lbp index out of range");
  PartitionedData out;
  out.lbp = lbp;
  out.rows = data.rows();
  out.total_features = d;
  out.labels = data.labels;
  const std::size_t base = d / participants;
  const std::size_t extra = d % participants;
  std::size_t next = 0;
  for (int p = 0; p < participants; ++p) {
    const std::size_t width = base + (static_cast<std::size_t>(p) < extra);
    Columns cols;
    std::vector<int> ids;
    std::vector<std::string> names;
    for (std::size_t j = next; j < next + width; ++j) {
      cols.push_back(data.columns[j]);
      ids.push_back(static_cast<int>(j));
      names.push_back(j < data.feature_names.size() ? data.feature_names[j]
                                                    : "f" + std::to_string(j));
    }
    next += width;
    out.parts.push_back(std::move(cols));
    out.global.push_back(std::move(ids));
    out.names.push_back(std::move(names));
  }
  return out;
}

// ------------------------------------------------------------- Participant

Participant::Participant(int index, bool is_lbp, Columns columns,
                         std::vector<int> global_ids,
                         std::vector<double> labels,
                         std::size_t total_features, KeyPair keys,
                         const PublicParams& pp,
                         std::shared_ptr<const FixedBaseTable> g_table,
                         MessageBus* bus, RunContext ctx)
    : index_(index),
      is_lbp_(is_lbp),
      columns_(std::move(columns)),
      global_ids_(std::move(global_ids)),
      labels_(std::move(labels)),
      total_features_(total_features),
      keys_(std::move(keys)),
      pp_(pp),
      encryptor_(pp, keys_.pk, participant_id(index), std::move(g_table)),
      bus_(bus),
      ctx_(ctx),
      rng_(ctx.seed, "participant/" + std::to_string(index)) {}

int Participant::local_column(int global) const {
  auto it = std::find(global_ids_.begin(), global_ids_.end(), global);
  if (it == global_ids_.end()) {
    throw ProtocolError(id() + " does not own feature " +
                        std::to_string(global));
  }
  return static_cast<int>(it - global_ids_.begin());
}

void Participant::reply(const Envelope& to, Message m) {
  m.session = to.message.session;
  m.round = to.message.round;
  bus_->send(id(), to.from, std::move(m));
}

void Participant::on_message(const Envelope& env) {
  const std::string& p = env.message.protocol;
  if (p == proto::kLbpRequest) {
    handle_lbp_request(env);
  } else if (p == proto::kGradients) {
    handle_gradients(env);
  } else if (p == proto::kSplitCandidates) {
    handle_candidates(env);
  } else if (p == proto::kSplitDecision) {
    handle_decision(env);
  } else if (p == proto::kPredictCompare) {
    handle_compare(env);
  } else {
    throw BusError(id() + " cannot handle " + p);
  }
}

void Participant::handle_lbp_request(const Envelope& env) {
  if (!is_lbp_) throw ProtocolError(id() + " is not the label holder");
  InstanceSpace rows(env.message.integers.begin(), env.message.integers.end());
  LbpResult res = lbp_xgb_train(columns_, labels_, ctx_.params, rows);
  const int f = ctx_.fp.scale_exp;
  const int s_pred = std::max(f, ctx_.fp.quotient_scale_exp);
  const int bound = ctx_.fp.bound_exp;
  auto enc = [&](double v, int scale) {
    return encryptor_.encrypt(encode(v, scale, pp_.n, bound), rng_);
  };

  Message up;
  up.protocol = proto::kLbpUpload;
  up.integers.push_back(static_cast<int64_t>(res.tree.nodes.size()));
  up.ciphertexts.push_back(enc(res.base_score, s_pred));
  for (std::size_t id = 0; id < res.tree.nodes.size(); ++id) {
    PlainTree::Node& node = res.tree.nodes[id];
    if (!node.leaf) {
      node.feature = global_ids_[node.feature];
      lookup_[{0, static_cast<int>(id)}] = {node.feature, node.threshold};
    }
    up.integers.push_back(node.leaf ? 1 : 0);
    up.integers.push_back(node.left);
    up.integers.push_back(node.right);
    up.integers.push_back(node.leaf ? -1 : node.feature);
    if (node.leaf) up.ciphertexts.push_back(enc(node.weight, s_pred));
  }
  for (double y : labels_) up.ciphertexts.push_back(enc(y, f));
  for (double yhat : res.preds) up.ciphertexts.push_back(enc(yhat, s_pred));
  lbp_result_ = std::move(res);
  reply(env, std::move(up));
}

void Participant::handle_gradients(const Envelope& env) {
  const Message& m = env.message;
  round_ = m.round;
  grads_.clear();
  pending_.clear();
  const int scale_g = static_cast<int>(m.integers.at(0));
  const int scale_h = static_cast<int>(m.integers.at(1));
  const std::size_t n = m.integers.size() - 2;
  if (m.ciphertexts.size() != 2 * n) {
    throw ProtocolError("gradients: expected two ciphertexts per row");
  }
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = static_cast<std::size_t>(m.integers[2 + r]);
    grads_[row] = {ScaledCiphertext{m.ciphertexts[2 * r], scale_g},
                   ScaledCiphertext{m.ciphertexts[2 * r + 1], scale_h}};
  }
}

void Participant::handle_candidates(const Envelope& env) {
  const Message& m = env.message;
  const int tree = static_cast<int>(m.integers.at(0));
  const int node = static_cast<int>(m.integers.at(1));
  const InstanceSpace rows(m.integers.begin() + 2, m.integers.end());
  const std::vector<int> allowed = sample_features(
      ctx_.seed, static_cast<int>(round_), total_features_,
      ctx_.params.subsample_cols);
  const int k = ctx_.params.candidate_count(rows.size());

  Message out;
  out.protocol = proto::kSplitCandidates;
  out.integers = {tree, node};
  auto& pending = pending_[{tree, node}];
  pending.clear();
  for (std::size_t local = 0; local < columns_.size(); ++local) {
    const int j = global_ids_[local];
    if (!std::binary_search(allowed.begin(), allowed.end(), j)) continue;
    const std::vector<double>& col = columns_[local];
    std::vector<double> values;
    values.reserve(rows.size());
    for (std::size_t i : rows) values.push_back(col[i]);
    const std::vector<double> thresholds = propose_thresholds(values, k);
    for (std::size_t c = 0; c < thresholds.size(); ++c) {
      std::optional<Ciphertext> gl, hl;
      for (std::size_t i : rows) {
        if (!(col[i] < thresholds[c])) continue;
        const auto& gh = grads_.at(i);
        gl = gl ? add(pp_, *gl, gh.first.ct) : gh.first.ct;
        hl = hl ? add(pp_, *hl, gh.second.ct) : gh.second.ct;
      }
      if (!gl) continue;
      pending[{j, static_cast<int>(c)}] = thresholds[c];
      out.integers.push_back(j);
      out.integers.push_back(static_cast<int64_t>(c));
      out.ciphertexts.push_back(std::move(*gl));
      out.ciphertexts.push_back(std::move(*hl));
    }
  }
  reply(env, std::move(out));
}

void Participant::handle_decision(const Envelope& env) {
  const Message& m = env.message;
  const int tree = static_cast<int>(m.integers.at(0));
  const int node = static_cast<int>(m.integers.at(1));
  const int j = static_cast<int>(m.integers.at(2));
  const int k = static_cast<int>(m.integers.at(3));
  const InstanceSpace rows(m.integers.begin() + 4, m.integers.end());
  const auto pit = pending_.find({tree, node});
  if (pit == pending_.end() || pit->second.count({j, k}) == 0) {
    throw ProtocolError(id() + ": unknown candidate (" + std::to_string(j) +
                        "," + std::to_string(k) + ")");
  }
  const double threshold = pit->second.at({j, k});
  lookup_[{tree, node}] = {j, threshold};
  pending_.erase(pit);
  const auto [left, right] =
      partition_instances(columns_[local_column(j)], rows, threshold);
  Message out;
  out.protocol = proto::kSplitDecision;
  out.integers = {tree, node};
  for (std::size_t i : left) out.integers.push_back(static_cast<int64_t>(i));
  reply(env, std::move(out));
}

void Participant::handle_compare(const Envelope& env) {
  const Message& m = env.message;
  const int tree = static_cast<int>(m.integers.at(0));
  const int node = static_cast<int>(m.integers.at(1));
  if (m.ciphertexts.size() != 1) throw ProtocolError("compare: one ciphertext");
  const Ciphertext& ct = m.ciphertexts[0];
  if (ct.key_id != id()) {
    throw KeyMismatchError(id() + " received a ciphertext under " + ct.key_id);
  }
  const auto it = lookup_.find({tree, node});
  if (it == lookup_.end()) {
    throw ProtocolError(id() + " has no split for this node");
  }
  const double v = decode(dec(pp_, keys_.sk, ct), ctx_.fp.scale_exp, pp_.n);
  Message out;
  out.protocol = proto::kPredictCompare;
  out.integers = {tree, node, v < it->second.threshold ? 1 : 0};
  reply(env, std::move(out));
}

// -------------------------------------------------------------- Federation

Federation::Federation(const PublicParams& pp, const MasterKey& mk,
                       const PartitionedData& data, RunContext ctx,
                       std::vector<KeyPair> keys)
    : pp_(pp),
      mk_(mk),
      data_(data),
      ctx_(ctx),
      g_table_(make_generator_table(pp)),
      bus_(pp.ciphertext_bytes()),
      harness_(pp, mk, g_table_) {
  ctx_.fp.validate(pp_.n);
  ctx_.params.validate();
  s_ = std::make_unique<ServerS>(pp_, mk_, ctx_.fp, g_table_, &bus_,
                                 RandomSource(ctx_.seed, "server-s"));
  c_ = std::make_unique<ServerC>(pp_, ctx_.fp, g_table_, &bus_,
                                 RandomSource(ctx_.seed, "server-c"));
  bus_.attach(kServerS, s_.get());
  bus_.attach(kServerC, c_.get());
  std::vector<BigInt> pks;
  for (int p = 0; p < static_cast<int>(data_.parts.size()); ++p) {
    KeyPair kp;
    if (keys.empty()) {
      RandomSource krng(ctx_.seed, "keygen/" + participant_id(p));
      kp = keygen(pp_, krng);
    } else {
      kp = keys.at(p);
    }
    pks.push_back(kp.pk);
    const bool is_lbp = p == data_.lbp;
    participants_.push_back(std::make_unique<Participant>(
        p, is_lbp, data_.parts[p], data_.global[p],
        is_lbp ? data_.labels : std::vector<double>{}, data_.total_features,
        std::move(kp), pp_, g_table_, &bus_, ctx_));
    bus_.attach(participant_id(p), participants_.back().get());
    register_key(participant_id(p), pks.back());
  }
  joint_pk_ = key_prod(pp_, pks);
  register_key(kJointKeyId, joint_pk_);
}

void Federation::register_key(const KeyId& id, const BigInt& pk) {
  keys_[id] = pk;
  s_->register_key(id, pk);
  c_->register_key(id, pk);
}

BigInt Federation::reveal_raw(const Ciphertext& ct) {
  return harness_.decrypt(keys_.at(ct.key_id), ct);
}

double Federation::reveal(const ScaledCiphertext& ct) {
  return decode(reveal_raw(ct.ct), ct.scale, pp_.n);
}

}  // namespace ssxgb
