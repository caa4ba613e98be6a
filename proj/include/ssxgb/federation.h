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

#ifndef SSXGB_FEDERATION_H_
#define SSXGB_FEDERATION_H_

// Participants, vertical partitioning and the assembled federation (bus, both
// servers, all participants) that training and prediction run on.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssxgb/bcp.h"
#include "ssxgb/bus.h"
#include "ssxgb/encoding.h"
#include "ssxgb/protocols.h"
#include "ssxgb/xgb_plain.h"

namespace ssxgb {

// Message ids exchanged between C and the participants.
namespace proto {
inline const std::string kLbpRequest = "lbp_request";
inline const std::string kLbpUpload = "lbp_upload";
inline const std::string kGradients = "gradients";
inline const std::string kSplitCandidates = "split_candidates";
inline const std::string kSplitDecision = "split_decision";
inline const std::string kPredictRecord = "predict_record";
inline const std::string kPredictCompare = "predict_compare";
inline const std::string kPredictResult = "predict_result";
}  // namespace proto

EntityId participant_id(int index);

// Sorted sample ids of one tree node.
using InstanceSpace = std::vector<std::size_t>;

// I_L = {i in node : values[i] < threshold}, I_R the rest.
std::pair<InstanceSpace, InstanceSpace> partition_instances(
    const std::vector<double>& values, const InstanceSpace& node,
    double threshold);

// Predicted ciphertext bytes for one split: participant -> C, and C <-> S.
uint64_t expected_cost_participant(uint64_t zeta, uint64_t d, uint64_t n,
                                   uint64_t q);
uint64_t expected_cost_servers(uint64_t zeta, uint64_t n, uint64_t q,
                               uint64_t big_d);

struct PartitionedData {
  std::vector<Columns> parts;            // per participant, local columns
  std::vector<std::vector<int>> global;  // per participant, global ids
  std::vector<std::vector<std::string>> names;
  std::vector<double> labels;            // held by the LBP only
  int lbp = 0;
  std::size_t rows = 0;
  std::size_t total_features = 0;
};

// Contiguous, near-even column blocks (the first D mod P blocks get one extra
// column). Throws ConfigError when there are more participants than features.
PartitionedData partition_columns(const PlainDataset& data, int participants,
                                  int lbp);

// (tree, node) -> split chosen at that node by this participant.
struct LookupEntry {
  int feature = 0;  // global id
  double threshold = 0.0;
};
using LookupTable = std::map<std::pair<int, int>, LookupEntry>;

struct RunContext {
  BoostParams params;
  FixedPointConfig fp;
  uint64_t seed = 0;
};

class Participant : public Entity {
 public:
  Participant(int index, bool is_lbp, Columns columns,
              std::vector<int> global_ids, std::vector<double> labels,
              std::size_t total_features, KeyPair keys, const PublicParams& pp,
              std::shared_ptr<const FixedBaseTable> g_table, MessageBus* bus,
              RunContext ctx);

  void on_message(const Envelope& envelope) override;

  int index() const { return index_; }
  EntityId id() const { return participant_id(index_); }
  bool is_lbp() const { return is_lbp_; }
  const BigInt& pk() const { return keys_.pk; }
  const KeyPair& keys() const { return keys_; }
  const std::vector<int>& global_ids() const { return global_ids_; }
  const Columns& columns() const { return columns_; }
  const LookupTable& lookup() const { return lookup_; }
  void set_lookup(LookupTable table) { lookup_ = std::move(table); }
  // Plaintext view of the LBP's first tree (features by global id).
  const std::optional<LbpResult>& lbp_result() const { return lbp_result_; }

 private:
  int local_column(int global) const;
  void handle_lbp_request(const Envelope& env);
  void handle_gradients(const Envelope& env);
  void handle_candidates(const Envelope& env);
  void handle_decision(const Envelope& env);
  void handle_compare(const Envelope& env);
  void reply(const Envelope& to, Message m);

  int index_;
  bool is_lbp_;
  Columns columns_;
  std::vector<int> global_ids_;
  std::vector<double> labels_;
  std::size_t total_features_;
  KeyPair keys_;
  PublicParams pp_;
  Encryptor encryptor_;
  MessageBus* bus_;
  RunContext ctx_;
  RandomSource rng_;

  uint32_t round_ = 0;
  std::map<std::size_t, std::pair<ScaledCiphertext, ScaledCiphertext>> grads_;
  std::map<std::pair<int, int>, std::map<std::pair<int, int>, double>>
      pending_;
  LookupTable lookup_;
  std::optional<LbpResult> lbp_result_;
};

// Everything one run needs: the bus, S (with the master key), C, and the
// participants, with the joint key registered everywhere.
class Federation {
 public:
  // Participant keys are generated from the seed unless supplied.
  Federation(const PublicParams& pp, const MasterKey& mk,
             const PartitionedData& data, RunContext ctx,
             std::vector<KeyPair> keys = {});

  MessageBus& bus() { return bus_; }
  ServerC& c() { return *c_; }
  ServerS& s() { return *s_; }
  Participant& participant(int i) { return *participants_.at(i); }
  int n_participants() const { return static_cast<int>(participants_.size()); }
  int lbp() const { return data_.lbp; }
  const PartitionedData& data() const { return data_; }
  const RunContext& context() const { return ctx_; }
  const PublicParams& pp() const { return pp_; }
  const BigInt& joint_pk() const { return joint_pk_; }
  std::shared_ptr<const FixedBaseTable> g_table() const { return g_table_; }

  // Registers an extra key (e.g. a prediction client) at both servers.
  void register_key(const KeyId& id, const BigInt& pk);

  // Test-harness only: master decryption of a ciphertext to its real value.
  double reveal(const ScaledCiphertext& ct);
  BigInt reveal_raw(const Ciphertext& ct);

 private:
  PublicParams pp_;
  MasterKey mk_;
  PartitionedData data_;
  RunContext ctx_;
  std::shared_ptr<const FixedBaseTable> g_table_;
  MessageBus bus_;
  std::unique_ptr<ServerS> s_;
  std::unique_ptr<ServerC> c_;
  std::vector<std::unique_ptr<Participant>> participants_;
  std::map<KeyId, BigInt> keys_;
  BigInt joint_pk_;
  MasterDecryptor harness_;
};

}  // namespace ssxgb

#endif  // SSXGB_FEDERATION_H_
