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

#ifndef SSXGB_BUS_H_
#define SSXGB_BUS_H_

// Deterministic in-process message bus between the federation entities.
//
// Delivery is a single global FIFO ordered by send sequence number, which is
// FIFO per edge as a consequence. Every delivered message is metered per
// (sender, receiver, protocol) and folded into a running SHA-256 transcript
// hash.

#include <openssl/evp.h>

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "ssxgb/bcp.h"

namespace ssxgb {

using EntityId = std::string;

inline const EntityId kServerC = "C";
inline const EntityId kServerS = "S";

struct Message {
  std::string protocol;
  uint64_t session = 0;
  uint32_t round = 0;
  std::vector<Ciphertext> ciphertexts;
  std::vector<int64_t> integers;
  // Key a re-encryption request targets; empty otherwise.
  KeyId target;
};

struct Envelope {
  uint64_t seq = 0;
  EntityId from;
  EntityId to;
  Message message;
};

class Entity {
 public:
  virtual ~Entity() = default;
  virtual void on_message(const Envelope& envelope) = 0;
};

// Fixed per-message framing: seq(8) session(8) round(4) protocol(2)
// target key(2) ct_count(4) int_count(4). Integers add 8 bytes each.
inline constexpr std::size_t kHeaderBytes = 32;
inline constexpr std::size_t kIntegerBytes = 8;

struct EdgeStats {
  uint64_t messages = 0;
  uint64_t ciphertexts = 0;
  uint64_t ciphertext_bytes = 0;
  uint64_t header_bytes = 0;

  uint64_t bytes() const { return ciphertext_bytes + header_bytes; }
  EdgeStats& operator+=(const EdgeStats& o);
};

class CommMeter {
 public:
  using Key = std::tuple<EntityId, EntityId, std::string>;
  using Filter = std::function<bool(const EntityId& from, const EntityId& to,
                                    const std::string& protocol)>;

  explicit CommMeter(std::size_t zeta) : zeta_(zeta) {}

  void record(const EntityId& from, const EntityId& to,
              const std::string& protocol, std::size_t ciphertexts,
              std::size_t integers);

  std::size_t zeta() const { return zeta_; }
  const std::map<Key, EdgeStats>& edges() const { return edges_; }
  EdgeStats total(const Filter& filter) const;
  EdgeStats total() const;

  // One CSV row per (from, to, protocol).
  void write_csv(std::ostream& out) const;

 private:
  std::size_t zeta_;
  std::map<Key, EdgeStats> edges_;
};

bool is_participant(const EntityId& id);
bool is_server(const EntityId& id);

class MessageBus {
 public:
  explicit MessageBus(std::size_t zeta);
  ~MessageBus();
  MessageBus(const MessageBus&) = delete;
  MessageBus& operator=(const MessageBus&) = delete;

  void attach(const EntityId& id, Entity* entity);
  bool has(const EntityId& id) const { return entities_.count(id) != 0; }

  // Enqueues; throws BusError for unknown endpoints.
  void send(const EntityId& from, const EntityId& to, Message message);
  // Delivers queued messages (including ones sent by handlers) until empty.
  void run_until_idle();

  uint64_t next_session() { return ++session_counter_; }

  CommMeter& meter() { return meter_; }
  const CommMeter& meter() const { return meter_; }

  // Hex SHA-256 over every delivered message so far.
  std::string transcript_hash() const;
  // One JSON line per delivered message:
  // {seq, from, to, protocol, round, ct_count, bytes}.
  void set_transcript_sink(std::ostream* sink) { sink_ = sink; }

  // Optional observer, called for each delivered envelope (tests).
  using Observer = std::function<void(const Envelope&)>;
  void set_observer(Observer observer) { observer_ = std::move(observer); }

 private:
  void absorb(const Envelope& env, std::size_t bytes);

  std::map<EntityId, Entity*> entities_;
  std::deque<Envelope> queue_;
  uint64_t seq_ = 0;
  uint64_t session_counter_ = 0;
  CommMeter meter_;
  std::ostream* sink_ = nullptr;
  Observer observer_;
  EVP_MD_CTX* hash_ctx_;
};

}  // namespace ssxgb

#endif  // SSXGB_BUS_H_
