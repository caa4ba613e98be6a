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

#ifndef SSXGB_PROTOCOLS_H_
#define SSXGB_PROTOCOLS_H_

// Two-server secure computation over BCP ciphertexts.
//
// ServerC holds public keys only and drives every protocol. ServerS holds the
// master key and answers masked requests. Both talk through the MessageBus;
// each interactive call is one request/response round trip.

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssxgb/bcp.h"
#include "ssxgb/bus.h"
#include "ssxgb/encoding.h"
#include "ssxgb/errors.h"

namespace ssxgb {

// Protocol ids as they appear on the bus and in the meter.
namespace proto {
inline const std::string kKeyProd = "key_prod";
inline const std::string kMult = "mult";
inline const std::string kTransDec = "trans_dec";
inline const std::string kLgt = "lgt";
inline const std::string kDiv = "div";
inline const std::string kTransformKey = "transform_key";
}  // namespace proto

// Reply status codes carried in integers[0] of every S response.
enum class SStatus : int64_t {
  kOk = 0,
  kZeroDenominator = 1,
  kHeadroom = 2,
  kUnknownKey = 3,
  kDecryptFailure = 4,
  kMalformed = 5,
};

// pk_joint = prod pk_i mod N^2. Throws ProtocolError on an empty set.
BigInt key_prod(const PublicParams& pp, const std::vector<BigInt>& pks);

struct AuditRecord {
  std::string protocol;
  uint64_t session = 0;
  // Plaintexts S recovered with mdec, in the order it decrypted them.
  std::vector<BigInt> plaintexts;
};

class ServerS : public Entity {
 public:
  ServerS(PublicParams pp, MasterKey mk, FixedPointConfig cfg,
          std::shared_ptr<const FixedBaseTable> g_table, MessageBus* bus,
          RandomSource rng);

  void register_key(const KeyId& id, const BigInt& pk);
  void on_message(const Envelope& envelope) override;

  void set_audit(bool enabled) { audit_enabled_ = enabled; }
  const std::vector<AuditRecord>& audit() const { return audit_; }
  void clear_audit() { audit_.clear(); }

 private:
  const Encryptor& encryptor(const KeyId& id);
  BigInt open(const Ciphertext& ct, AuditRecord& record);
  Message respond(const Envelope& request);

  PublicParams pp_;
  FixedPointConfig cfg_;
  std::shared_ptr<const FixedBaseTable> g_table_;
  MasterDecryptor decryptor_;
  MessageBus* bus_;
  RandomSource rng_;
  std::map<KeyId, BigInt> keys_;
  std::map<KeyId, std::unique_ptr<Encryptor>> encryptors_;
  bool audit_enabled_ = false;
  std::vector<AuditRecord> audit_;
};

struct CandidateKey {
  int participant = 0;
  int feature = 0;
  int candidate = 0;

  auto operator<=>(const CandidateKey&) const = default;
};

class ServerC : public Entity {
 public:
  ServerC(PublicParams pp, FixedPointConfig cfg,
          std::shared_ptr<const FixedBaseTable> g_table, MessageBus* bus,
          RandomSource rng);

  void register_key(const KeyId& id, const BigInt& pk);
  bool has_key(const KeyId& id) const { return keys_.count(id) != 0; }

  void on_message(const Envelope& envelope) override;
  // Removes and returns the oldest queued message from `from` with the given
  // protocol. Throws BusError when there is none.
  Envelope take(const EntityId& from, const std::string& protocol);
  std::size_t pending() const { return inbox_.size(); }

  void set_round(uint32_t round) { round_ = round; }
  uint32_t round() const { return round_; }

  // Local homomorphic operations (no interaction).
  ScaledCiphertext encrypt(double v, int scale);
  ScaledCiphertext encrypt_raw(const BigInt& raw, int scale);
  Ciphertext encrypt_under(const KeyId& id, const BigInt& raw);
  ScaledCiphertext add(const ScaledCiphertext& a,
                       const ScaledCiphertext& b) const;
  ScaledCiphertext sub(const ScaledCiphertext& a,
                       const ScaledCiphertext& b) const;
  ScaledCiphertext neg(const ScaledCiphertext& a) const;
  // Multiplies the plaintext by k; the result scale is a.scale + added_scale.
  ScaledCiphertext exp(const ScaledCiphertext& a, const BigInt& k,
                       int added_scale = 0) const;
  // Exact rescale to a larger scale via exp by 2^(scale - a.scale).
  ScaledCiphertext upscale(const ScaledCiphertext& a, int scale) const;
  // Fresh randomness on the same plaintext.
  ScaledCiphertext rerandomize(const ScaledCiphertext& a);

  // Interactive sub-protocols with S.
  ScaledCiphertext mult(const ScaledCiphertext& a, const ScaledCiphertext& b);
  // Joint key -> target user key.
  Ciphertext trans_dec(const Ciphertext& c, const KeyId& target);
  // User key -> joint key.
  Ciphertext to_joint(const Ciphertext& c);
  // Any registered key -> target key, under the transform_key protocol id.
  Ciphertext transform_key(const Ciphertext& c, const KeyId& target);
  // True iff a < b. Equal scales required.
  bool lgt(const ScaledCiphertext& a, const ScaledCiphertext& b);
  // num / den at the quotient scale. Operand scales are aligned first.
  ScaledCiphertext div(const ScaledCiphertext& num,
                       const ScaledCiphertext& den);

  // Key of the largest entry; ties keep the earliest key.
  template <typename Key>
  Key sargmax(const std::map<Key, ScaledCiphertext>& entries);

  const PublicParams& pp() const { return pp_; }
  const FixedPointConfig& fixed_point() const { return cfg_; }
  RandomSource& rng() { return rng_; }
  MessageBus& bus() { return *bus_; }

  // Test hooks.
  void force_coin(std::optional<bool> coin) { forced_coin_ = coin; }
  std::pair<BigInt, BigInt> last_div_masks() const {
    return {last_tau1_, last_tau2_};
  }

 private:
  const Encryptor& encryptor(const KeyId& id);
  Envelope rpc(Message request);
  Ciphertext reencrypt(const std::string& protocol, const Ciphertext& c,
                       const KeyId& target);
  BigInt mask();
  void check_scale(const ScaledCiphertext& a, const ScaledCiphertext& b,
                   const char* op) const;

  PublicParams pp_;
  FixedPointConfig cfg_;
  std::shared_ptr<const FixedBaseTable> g_table_;
  MessageBus* bus_;
  RandomSource rng_;
  std::map<KeyId, BigInt> keys_;
  std::map<KeyId, std::unique_ptr<Encryptor>> encryptors_;
  std::vector<Envelope> inbox_;
  uint32_t round_ = 0;
  std::optional<bool> forced_coin_;
  BigInt last_tau1_;
  BigInt last_tau2_;
};

template <typename Key>
Key ServerC::sargmax(const std::map<Key, ScaledCiphertext>& entries) {
  if (entries.empty()) throw ProtocolError("sargmax over an empty map");
  auto best = entries.begin();
  for (auto it = std::next(best); it != entries.end(); ++it) {
    if (lgt(best->second, it->second)) best = it;
  }
  return best->first;
}

}  // namespace ssxgb

#endif  // SSXGB_PROTOCOLS_H_
