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

#include "ssxgb/protocols.h"

#include <algorithm>
#include <string>

namespace ssxgb {

namespace {

BigInt pow2(int e) {
  BigInt out = 1;
  out <<= static_cast<unsigned>(e);
  return out;
}

Message reply_to(const Envelope& request, SStatus status) {
  Message m;
  m.protocol = request.message.protocol;
  m.session = request.message.session;
  m.round = request.message.round;
  m.integers.push_back(static_cast<int64_t>(status));
  return m;
}

const char* describe(SStatus s) {
  switch (s) {
    case SStatus::kOk:
      return "ok";
    case SStatus::kZeroDenominator:
      return "denominator decrypts to zero";
    case SStatus::kHeadroom:
      return "masked value exceeds the plaintext headroom";
    case SStatus::kUnknownKey:
      return "key not registered at S";
    case SStatus::kDecryptFailure:
      return "S could not decrypt the request";
    case SStatus::kMalformed:
      return "malformed request";
  }
  return "unknown status";
}

}  // namespace

BigInt key_prod(const PublicParams& pp, const std::vector<BigInt>& pks) {
  if (pks.empty()) throw ProtocolError("key_prod needs at least one key");
  BigInt out = 1;
  for (const BigInt& pk : pks) out = (out * pk) % pp.n_squared;
  return out;
}

// ---------------------------------------------------------------- ServerS

ServerS::ServerS(PublicParams pp, MasterKey mk, FixedPointConfig cfg,
                 std::shared_ptr<const FixedBaseTable> g_table,
                 MessageBus* bus, RandomSource rng)
    : pp_(std::move(pp)),
      cfg_(cfg),
      g_table_(g_table),
      decryptor_(pp_, mk, g_table),
      bus_(bus),
      rng_(std::move(rng)) {}

void ServerS::register_key(const KeyId& id, const BigInt& pk) {
  keys_[id] = pk;
  encryptors_.erase(id);
}

const Encryptor& ServerS::encryptor(const KeyId& id) {
  auto it = encryptors_.find(id);
  if (it == encryptors_.end()) {
    it = encryptors_
             .emplace(id, std::make_unique<Encryptor>(pp_, keys_.at(id), id,
                                                      g_table_))
             .first;
  }
  return *it->second;
}

BigInt ServerS::open(const Ciphertext& ct, AuditRecord& record) {
  const BigInt m = decryptor_.decrypt(keys_.at(ct.key_id), ct);
  record.plaintexts.push_back(m);
  return m;
}

void ServerS::on_message(const Envelope& envelope) {
  Message reply = respond(envelope);
  bus_->send(kServerS, envelope.from, std::move(reply));
}

Message ServerS::respond(const Envelope& request) {
  const Message& m = request.message;
  const std::vector<Ciphertext>& cts = m.ciphertexts;
  for (const Ciphertext& ct : cts) {
    if (keys_.count(ct.key_id) == 0) {
      return reply_to(request, SStatus::kUnknownKey);
    }
    if (!well_formed(pp_, ct)) return reply_to(request, SStatus::kMalformed);
  }
  AuditRecord record{m.protocol, m.session, {}};
  Message out = reply_to(request, SStatus::kOk);
  try {
    if (m.protocol == proto::kKeyProd || m.protocol == proto::kTransDec ||
        m.protocol == proto::kTransformKey) {
      if (cts.size() != 1) return reply_to(request, SStatus::kMalformed);
      if (keys_.count(m.target) == 0) {
        return reply_to(request, SStatus::kUnknownKey);
      }
      const BigInt x = open(cts[0], record);
      out.ciphertexts.push_back(encryptor(m.target).encrypt(x, rng_));
    } else if (m.protocol == proto::kMult) {
      if (cts.size() != 2 || cts[0].key_id != cts[1].key_id) {
        return reply_to(request, SStatus::kMalformed);
      }
      const BigInt x1 = open(cts[0], record);
      const BigInt x2 = open(cts[1], record);
      const BigInt prod = (x1 * x2) % pp_.n;
      out.ciphertexts.push_back(encryptor(cts[0].key_id).encrypt(prod, rng_));
    } else if (m.protocol == proto::kLgt) {
      if (cts.size() != 1) return reply_to(request, SStatus::kMalformed);
      const BigInt l = open(cts[0], record);
      const std::size_t half = bit_length(pp_.n) / 2;
      // Both l and N - l small would make the bit-length test ambiguous.
      const BigInt magnitude = std::min<BigInt>(l, pp_.n - l);
      if (magnitude >= pow2(static_cast<int>(half) - 1)) {
        return reply_to(request, SStatus::kHeadroom);
      }
      out.integers.push_back(bit_length(l) > half ? 1 : 0);
    } else if (m.protocol == proto::kDiv) {
      if (cts.size() != 2 || cts[0].key_id != cts[1].key_id) {
        return reply_to(request, SStatus::kMalformed);
      }
      const BigInt x = to_signed(open(cts[0], record), pp_.n);
      const BigInt y = to_signed(open(cts[1], record), pp_.n);
      if (y == 0) return reply_to(request, SStatus::kZeroDenominator);
      const BigInt quarter = pp_.n / 4;
      if (abs(x) >= quarter || abs(y) >= quarter) {
        return reply_to(request, SStatus::kHeadroom);
      }
      const BigInt q = rounded_quotient(x, y, cfg_.quotient_scale_exp);
      if (abs(q) >= quarter) return reply_to(request, SStatus::kHeadroom);
      out.ciphertexts.push_back(
          encryptor(cts[0].key_id).encrypt(from_signed(q, pp_.n), rng_));
    } else {
      return reply_to(request, SStatus::kMalformed);
    }
  } catch (const DecryptionError&) {
    return reply_to(request, SStatus::kDecryptFailure);
  }
  if (audit_enabled_) audit_.push_back(std::move(record));
  return out;
}

// ---------------------------------------------------------------- ServerC

ServerC::ServerC(PublicParams pp, FixedPointConfig cfg,
                 std::shared_ptr<const FixedBaseTable> g_table,
                 MessageBus* bus, RandomSource rng)
    : pp_(std::move(pp)),
      cfg_(cfg),
      g_table_(std::move(g_table)),
      bus_(bus),
      rng_(std::move(rng)) {}

void ServerC::register_key(const KeyId& id, const BigInt& pk) {
  keys_[id] = pk;
  encryptors_.erase(id);
}

const Encryptor& ServerC::encryptor(const KeyId& id) {
  auto it = encryptors_.find(id);
  if (it == encryptors_.end()) {
    auto key = keys_.find(id);
    if (key == keys_.end()) throw ProtocolError("unknown key " + id);
    it = encryptors_
             .emplace(id, std::make_unique<Encryptor>(pp_, key->second, id,
                                                      g_table_))
             .first;
  }
  return *it->second;
}

void ServerC::on_message(const Envelope& envelope) {
  inbox_.push_back(envelope);
}

Envelope ServerC::take(const EntityId& from, const std::string& protocol) {
  for (auto it = inbox_.begin(); it != inbox_.end(); ++it) {
    if (it->from == from && it->message.protocol == protocol) {
      Envelope out = std::move(*it);
      inbox_.erase(it);
      return out;
    }
  }
  throw BusError("no pending " + protocol + " message from " + from);
}

Envelope ServerC::rpc(Message request) {
  request.session = bus_->next_session();
  request.round = round_;
  const std::string protocol = request.protocol;
  const uint64_t session = request.session;
  bus_->send(kServerC, kServerS, std::move(request));
  bus_->run_until_idle();
  for (auto it = inbox_.begin(); it != inbox_.end(); ++it) {
    if (it->from == kServerS && it->message.session == session) {
      Envelope reply = std::move(*it);
      inbox_.erase(it);
      const auto& ints = reply.message.integers;
      if (ints.empty()) throw ProtocolError(protocol + ": empty reply");
      const auto status = static_cast<SStatus>(ints[0]);
      if (status != SStatus::kOk) {
        throw ProtocolError(protocol + ": " + describe(status));
      }
      return reply;
    }
  }
  throw ProtocolError(protocol + ": S did not reply");
}

BigInt ServerC::mask() {
  return rng_.bits(static_cast<unsigned>(cfg_.mask_bits + cfg_.bound_exp));
}

void ServerC::check_scale(const ScaledCiphertext& a, const ScaledCiphertext& b,
                          const char* op) const {
  if (a.scale != b.scale) {
    throw ScaleMismatchError(std::string(op) + ": scales " +
                             std::to_string(a.scale) + " and " +
                             std::to_string(b.scale));
  }
}

ScaledCiphertext ServerC::encrypt(double v, int scale) {
  return encrypt_raw(encode(v, scale, pp_.n, cfg_.bound_exp), scale);
}

ScaledCiphertext ServerC::encrypt_raw(const BigInt& raw, int scale) {
  return {encryptor(kJointKeyId).encrypt(raw, rng_), scale};
}

Ciphertext ServerC::encrypt_under(const KeyId& id, const BigInt& raw) {
  return encryptor(id).encrypt(raw, rng_);
}

ScaledCiphertext ServerC::add(const ScaledCiphertext& a,
                              const ScaledCiphertext& b) const {
  check_scale(a, b, "add");
  return {ssxgb::add(pp_, a.ct, b.ct), a.scale};
}

ScaledCiphertext ServerC::sub(const ScaledCiphertext& a,
                              const ScaledCiphertext& b) const {
  check_scale(a, b, "sub");
  return {ssxgb::add(pp_, a.ct, ssxgb::neg(pp_, b.ct)), a.scale};
}

ScaledCiphertext ServerC::neg(const ScaledCiphertext& a) const {
  return {ssxgb::neg(pp_, a.ct), a.scale};
}

ScaledCiphertext ServerC::exp(const ScaledCiphertext& a, const BigInt& k,
                              int added_scale) const {
  return {ssxgb::exp(pp_, a.ct, k), a.scale + added_scale};
}

ScaledCiphertext ServerC::upscale(const ScaledCiphertext& a, int scale) const {
  if (scale < a.scale) {
    throw ScaleMismatchError("upscale cannot lower a scale");
  }
  if (scale == a.scale) return a;
  return exp(a, pow2(scale - a.scale), scale - a.scale);
}

ScaledCiphertext ServerC::rerandomize(const ScaledCiphertext& a) {
  return {ssxgb::add(pp_, a.ct, encryptor(a.ct.key_id).encrypt(0, rng_)),
          a.scale};
}

ScaledCiphertext ServerC::mult(const ScaledCiphertext& a,
                               const ScaledCiphertext& b) {
  if (a.ct.key_id != b.ct.key_id) {
    throw KeyMismatchError("mult operands under different keys");
  }
  if (a.scale + b.scale >= cfg_.bound_exp) {
    throw OverflowError("mult result scale exceeds the plaintext bound");
  }
  const Encryptor& e = encryptor(a.ct.key_id);
  const BigInt r1 = mask();
  const BigInt r2 = mask();
  Message req;
  req.protocol = proto::kMult;
  req.ciphertexts.push_back(ssxgb::add(pp_, a.ct, e.encrypt(r1 % pp_.n, rng_)));
  req.ciphertexts.push_back(ssxgb::add(pp_, b.ct, e.encrypt(r2 % pp_.n, rng_)));
  Envelope reply = rpc(std::move(req));
  if (reply.message.ciphertexts.size() != 1) {
    throw ProtocolError("mult: malformed reply");
  }
  // (m1 + r1)(m2 + r2) - r2 m1 - r1 m2 - r1 r2 = m1 m2.
  Ciphertext out = reply.message.ciphertexts[0];
  out = ssxgb::add(pp_, out, ssxgb::exp(pp_, a.ct, -r2));
  out = ssxgb::add(pp_, out, ssxgb::exp(pp_, b.ct, -r1));
  out = ssxgb::add(pp_, out,
                   e.encrypt(from_signed(-(r1 * r2), pp_.n), rng_));
  return {out, a.scale + b.scale};
}

Ciphertext ServerC::reencrypt(const std::string& protocol, const Ciphertext& c,
                              const KeyId& target) {
  if (!has_key(target)) throw ProtocolError("unknown target key " + target);
  if (!has_key(c.key_id)) throw ProtocolError("unknown source key " + c.key_id);
  const BigInt r = rng_.below(pp_.n);
  Message req;
  req.protocol = protocol;
  req.target = target;
  req.ciphertexts.push_back(
      ssxgb::add(pp_, c, encryptor(c.key_id).encrypt(r, rng_)));
  Envelope reply = rpc(std::move(req));
  if (reply.message.ciphertexts.size() != 1 ||
      reply.message.ciphertexts[0].key_id != target) {
    throw ProtocolError(protocol + ": malformed reply");
  }
  return ssxgb::add(pp_, reply.message.ciphertexts[0],
                    encryptor(target).encrypt(from_signed(-r, pp_.n), rng_));
}

Ciphertext ServerC::trans_dec(const Ciphertext& c, const KeyId& target) {
  if (c.key_id != kJointKeyId) {
    throw KeyMismatchError("trans_dec expects a joint-key ciphertext");
  }
  return reencrypt(proto::kTransDec, c, target);
}

Ciphertext ServerC::to_joint(const Ciphertext& c) {
  return reencrypt(proto::kKeyProd, c, kJointKeyId);
}

Ciphertext ServerC::transform_key(const Ciphertext& c, const KeyId& target) {
  return reencrypt(proto::kTransformKey, c, target);
}

bool ServerC::lgt(const ScaledCiphertext& a, const ScaledCiphertext& b) {
  check_scale(a, b, "lgt");
  if (a.ct.key_id != b.ct.key_id) {
    throw KeyMismatchError("lgt operands under different keys");
  }
  const Encryptor& e = encryptor(a.ct.key_id);
  const Ciphertext twice_a_plus_one =
      ssxgb::add(pp_, ssxgb::exp(pp_, a.ct, 2), e.encrypt(1, rng_));
  const Ciphertext twice_b = ssxgb::exp(pp_, b.ct, 2);
  const bool s = forced_coin_.has_value() ? *forced_coin_ : rng_.coin();
  Ciphertext l = s ? ssxgb::add(pp_, twice_a_plus_one, ssxgb::neg(pp_, twice_b))
                   : ssxgb::add(pp_, twice_b, ssxgb::neg(pp_, twice_a_plus_one));
  const BigInt rho = rng_.in_range(1, pow2(cfg_.mask_bits));
  l = ssxgb::exp(pp_, l, rho);
  Message req;
  req.protocol = proto::kLgt;
  req.ciphertexts.push_back(std::move(l));
  Envelope reply = rpc(std::move(req));
  if (reply.message.integers.size() != 2) {
    throw ProtocolError("lgt: malformed reply");
  }
  const bool u_prime = reply.message.integers[1] != 0;
  return s ? u_prime : !u_prime;
}

ScaledCiphertext ServerC::div(const ScaledCiphertext& num,
                              const ScaledCiphertext& den) {
  if (num.ct.key_id != den.ct.key_id) {
    throw KeyMismatchError("div operands under different keys");
  }
  const int scale = std::max(num.scale, den.scale);
  const ScaledCiphertext m1 = upscale(num, scale);
  const ScaledCiphertext m2 = upscale(den, scale);
  const BigInt tau1 = rng_.in_range(1, pow2(cfg_.mask_bits));
  const BigInt tau2 = rng_.in_range(1, pow2(cfg_.mask_bits));
  last_tau1_ = tau1;
  last_tau2_ = tau2;
  const Encryptor& e = encryptor(num.ct.key_id);
  Ciphertext x = ssxgb::add(pp_, ssxgb::exp(pp_, m1.ct, tau1),
                            ssxgb::exp(pp_, m2.ct, tau2));
  x = ssxgb::add(pp_, x, e.encrypt(0, rng_));
  Ciphertext y = ssxgb::exp(pp_, m2.ct, tau1);
  y = ssxgb::add(pp_, y, e.encrypt(0, rng_));
  Message req;
  req.protocol = proto::kDiv;
  req.ciphertexts = {std::move(x), std::move(y)};
  Envelope reply = rpc(std::move(req));
  if (reply.message.ciphertexts.size() != 1) {
    throw ProtocolError("div: malformed reply");
  }
  // S returned round(2^fq (m1/m2 + tau2/tau1)); remove the tau2/tau1 term.
  const BigInt correction =
      rounded_quotient(tau2, tau1, cfg_.quotient_scale_exp);
  Ciphertext out = ssxgb::add(
      pp_, reply.message.ciphertexts[0],
      e.encrypt(from_signed(-correction, pp_.n), rng_));
  return {out, cfg_.quotient_scale_exp};
}

}  // namespace ssxgb
