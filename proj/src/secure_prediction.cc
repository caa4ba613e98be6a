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

#include "ssxgb/secure_prediction.h"

#include "ssxgb/errors.h"

namespace ssxgb {

Client::Client(EntityId id, KeyPair keys, const PublicParams& pp,
               std::shared_ptr<const FixedBaseTable> g_table,
               FixedPointConfig fp, MessageBus* bus, RandomSource rng)
    : id_(std::move(id)),
      keys_(std::move(keys)),
      pp_(pp),
      encryptor_(pp, keys_.pk, id_, std::move(g_table)),
      fp_(fp),
      bus_(bus),
      rng_(std::move(rng)) {}

std::vector<Ciphertext> Client::encrypt_record(const std::vector<double>& x) {
  std::vector<Ciphertext> out;
  out.reserve(x.size());
  for (double v : x) {
    out.push_back(
        encryptor_.encrypt(encode(v, fp_.scale_exp, pp_.n, fp_.bound_exp), rng_));
  }
  return out;
}

void Client::submit(const std::vector<double>& x) {
  Message m;
  m.protocol = proto::kPredictRecord;
  m.session = bus_->next_session();
  m.ciphertexts = encrypt_record(x);
  bus_->send(id_, kServerC, std::move(m));
}

void Client::on_message(const Envelope& env) {
  if (env.message.protocol != proto::kPredictResult) {
    throw BusError(id_ + " cannot handle " + env.message.protocol);
  }
  const Message& m = env.message;
  if (m.ciphertexts.size() != 1 || m.integers.size() != 1) {
    throw ProtocolError("predict_result layout");
  }
  if (m.ciphertexts[0].key_id != id_) {
    throw KeyMismatchError("result not under the client key");
  }
  results_.push_back({m.ciphertexts[0], static_cast<int>(m.integers[0])});
}

std::optional<double> Client::take_score() {
  if (results_.empty()) return std::nullopt;
  const ScaledCiphertext r = results_.front();
  results_.erase(results_.begin());
  return decode(dec(pp_, keys_.sk, r.ct), r.scale, pp_.n);
}

std::unique_ptr<Client> make_client(Federation& fed, const EntityId& id) {
  RandomSource krng(fed.context().seed, "keygen/" + id);
  KeyPair kp = keygen(fed.pp(), krng);
  auto client = std::make_unique<Client>(
      id, kp, fed.pp(), fed.g_table(), fed.context().fp, &fed.bus(),
      RandomSource(fed.context().seed, "client/" + id));
  fed.bus().attach(id, client.get());
  fed.register_key(id, kp.pk);
  return client;
}

ScaledCiphertext spredict(ServerC& c, const TreeList& model,
                          const std::vector<Ciphertext>& record,
                          const KeyId& client_key, SPredictTrace* trace) {
  MessageBus& bus = c.bus();
  ScaledCiphertext acc = model.base_score;
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const SecureTree& tree = model.trees[t];
    int id = 0;
    while (!tree.nodes.at(id).leaf) {
      const SecureTree::Node& node = tree.nodes[id];
      if (node.feature < 0 ||
          static_cast<std::size_t>(node.feature) >= record.size()) {
        throw ProtocolError("record is missing feature " +
                            std::to_string(node.feature));
      }
      const EntityId owner = participant_id(node.owner);
      if (!bus.has(owner)) throw ProtocolError(owner + " is offline");
      Message req;
      req.protocol = proto::kPredictCompare;
      req.session = bus.next_session();
      req.round = c.round();
      req.integers = {static_cast<int64_t>(t), id};
      req.ciphertexts.push_back(c.transform_key(record[node.feature], owner));
      bus.send(kServerC, owner, std::move(req));
      bus.run_until_idle();
      const Envelope reply = c.take(owner, proto::kPredictCompare);
      if (reply.message.integers.size() != 3) {
        throw ProtocolError("predict_compare layout");
      }
      id = reply.message.integers[2] != 0 ? node.left : node.right;
      if (trace != nullptr) ++trace->owner_interactions;
    }
    if (trace != nullptr) trace->leaves.push_back(id);
    const ScaledCiphertext& w = *tree.nodes[id].weight;
    acc = w.scale <= acc.scale ? c.add(acc, c.upscale(w, acc.scale))
                               : c.add(c.upscale(acc, w.scale), w);
  }
  return {c.trans_dec(acc.ct, client_key), acc.scale};
}

void serve_prediction(ServerC& c, const TreeList& model,
                      const EntityId& client) {
  const Envelope req = c.take(client, proto::kPredictRecord);
  const ScaledCiphertext score =
      spredict(c, model, req.message.ciphertexts, client);
  Message m;
  m.protocol = proto::kPredictResult;
  m.session = req.message.session;
  m.ciphertexts.push_back(score.ct);
  m.integers.push_back(score.scale);
  c.bus().send(kServerC, client, std::move(m));
  c.bus().run_until_idle();
}

}  // namespace ssxgb
