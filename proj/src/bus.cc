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

#include "ssxgb/bus.h"

#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "ssxgb/errors.h"

namespace ssxgb {

EdgeStats& EdgeStats::operator+=(const EdgeStats& o) {
  messages += o.messages;
  ciphertexts += o.ciphertexts;
  ciphertext_bytes += o.ciphertext_bytes;
  header_bytes += o.header_bytes;
  return *this;
}

void CommMeter::record(const EntityId& from, const EntityId& to,
                       const std::string& protocol, std::size_t ciphertexts,
                       std::size_t integers) {
  EdgeStats& e = edges_[Key{from, to, protocol}];
  e.messages += 1;
  e.ciphertexts += ciphertexts;
  e.ciphertext_bytes += ciphertexts * zeta_;
  e.header_bytes += kHeaderBytes + integers * kIntegerBytes;
}

EdgeStats CommMeter::total(const Filter& filter) const {
  EdgeStats out;
  for (const auto& [key, stats] : edges_) {
    const auto& [from, to, protocol] = key;
    if (filter(from, to, protocol)) out += stats;
  }
  return out;
}

EdgeStats CommMeter::total() const {
  return total([](const EntityId&, const EntityId&, const std::string&) {
    return true;
  });
}

void CommMeter::write_csv(std::ostream& out) const {
  out << "from,to,protocol,messages,ciphertexts,ciphertext_bytes,"
         "header_bytes,bytes\n";
  for (const auto& [key, s] : edges_) {
    const auto& [from, to, protocol] = key;
    out << from << ',' << to << ',' << protocol << ',' << s.messages << ','
        << s.ciphertexts << ',' << s.ciphertext_bytes << ',' << s.header_bytes
        << ',' << s.bytes() << '\n';
  }
}

bool is_participant(const EntityId& id) {
  return !id.empty() && id[0] == 'P';
}

bool is_server(const EntityId& id) { return id == kServerC || id == kServerS; }

MessageBus::MessageBus(std::size_t zeta)
    : meter_(zeta), hash_ctx_(EVP_MD_CTX_new()) {
  EVP_DigestInit_ex(hash_ctx_, EVP_sha256(), nullptr);
}

MessageBus::~MessageBus() { EVP_MD_CTX_free(hash_ctx_); }

void MessageBus::attach(const EntityId& id, Entity* entity) {
  entities_[id] = entity;
}

void MessageBus::send(const EntityId& from, const EntityId& to,
                      Message message) {
  if (!has(from)) throw BusError("unknown sender " + from);
  if (!has(to)) throw BusError("unknown receiver " + to);
  queue_.push_back(Envelope{++seq_, from, to, std::move(message)});
}

void MessageBus::run_until_idle() {
  while (!queue_.empty()) {
    Envelope env = std::move(queue_.front());
    queue_.pop_front();
    const Message& m = env.message;
    meter_.record(env.from, env.to, m.protocol, m.ciphertexts.size(),
                  m.integers.size());
    const std::size_t bytes = m.ciphertexts.size() * meter_.zeta() +
                              kHeaderBytes + m.integers.size() * kIntegerBytes;
    absorb(env, bytes);
    if (observer_) observer_(env);
    entities_.at(env.to)->on_message(env);
  }
}

void MessageBus::absorb(const Envelope& env, std::size_t bytes) {
  const Message& m = env.message;
  nlohmann::json line = {{"seq", env.seq},
                         {"from", env.from},
                         {"to", env.to},
                         {"protocol", m.protocol},
                         {"round", m.round},
                         {"ct_count", m.ciphertexts.size()},
                         {"bytes", bytes}};
  const std::string text = line.dump();
  if (sink_ != nullptr) *sink_ << text << '\n';
  // The hash also covers the payload, so equal transcripts mean equal bytes.
  std::string payload = text;
  payload += '|';
  payload += std::to_string(m.session);
  payload += '|';
  payload += m.target;
  for (const Ciphertext& ct : m.ciphertexts) {
    payload += '|';
    payload += ct.a.get_str(16);
    payload += ',';
    payload += ct.b.get_str(16);
    payload += ',';
    payload += ct.key_id;
  }
  for (int64_t v : m.integers) {
    payload += '|';
    payload += std::to_string(v);
  }
  payload += '\n';
  EVP_DigestUpdate(hash_ctx_, payload.data(), payload.size());
}

std::string MessageBus::transcript_hash() const {
  EVP_MD_CTX* copy = EVP_MD_CTX_new();
  EVP_MD_CTX_copy_ex(copy, hash_ctx_);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(copy, digest, &len);
  EVP_MD_CTX_free(copy);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  }
  return out.str();
}

}  // namespace ssxgb
