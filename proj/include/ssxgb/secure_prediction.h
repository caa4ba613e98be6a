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

#ifndef SSXGB_SECURE_PREDICTION_H_
#define SSXGB_SECURE_PREDICTION_H_

// Scoring an encrypted client record against a trained TreeList. C walks each
// tree, asking the owner of every internal node for the branch bit after
// re-keying the relevant feature to that owner.

#include <memory>
#include <optional>
#include <vector>

#include "ssxgb/federation.h"
#include "ssxgb/secure_training.h"

namespace ssxgb {

class Client : public Entity {
 public:
  Client(EntityId id, KeyPair keys, const PublicParams& pp,
         std::shared_ptr<const FixedBaseTable> g_table, FixedPointConfig fp,
         MessageBus* bus, RandomSource rng);

  const EntityId& id() const { return id_; }
  const BigInt& pk() const { return keys_.pk; }

  // Enc(encode(x_j, f)) under the client's key, in global feature order.
  std::vector<Ciphertext> encrypt_record(const std::vector<double>& x);
  // Sends the encrypted record to C (delivered on the next bus run).
  void submit(const std::vector<double>& x);
  void on_message(const Envelope& envelope) override;
  // Decrypted logit of the oldest unread result.
  std::optional<double> take_score();

 private:
  EntityId id_;
  KeyPair keys_;
  PublicParams pp_;
  Encryptor encryptor_;
  FixedPointConfig fp_;
  MessageBus* bus_;
  RandomSource rng_;
  std::vector<ScaledCiphertext> results_;
};

// Creates a client with a fresh key registered at both servers.
std::unique_ptr<Client> make_client(Federation& fed, const EntityId& id);

struct SPredictTrace {
  std::vector<int> leaves;  // leaf reached per tree
  int owner_interactions = 0;
};

// Score of one record under the joint key, re-keyed to client_key.
ScaledCiphertext spredict(ServerC& c, const TreeList& model,
                          const std::vector<Ciphertext>& record,
                          const KeyId& client_key,
                          SPredictTrace* trace = nullptr);

// Takes the next predict_record from `client` off C's inbox, scores it and
// sends the result back.
void serve_prediction(ServerC& c, const TreeList& model,
                      const EntityId& client);

}  // namespace ssxgb

#endif  // SSXGB_SECURE_PREDICTION_H_
