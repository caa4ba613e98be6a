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

#ifndef SSXGB_BCP_H_
#define SSXGB_BCP_H_

// BCP double-trapdoor additively homomorphic cryptosystem.
//
// Plaintexts live in Z_N, ciphertexts are pairs (A, B) in Z*_{N^2}. Each user
// decrypts with its own secret exponent; the holder of the master key
// (p', q') can decrypt a ciphertext under any legitimately generated public
// key.

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ssxgb/random.h"

namespace ssxgb {

using KeyId = std::string;
inline const KeyId kJointKeyId = "joint";

struct PublicParams {
  BigInt n;
  BigInt n_squared;
  BigInt g;
  // g^{p'q'} = 1 + kconst * N (mod N^2).
  BigInt kconst;
  unsigned k_bits = 0;

  // Serialized size of one (A, B) pair: two fixed-width elements of Z_{N^2}.
  std::size_t ciphertext_bytes() const;
  std::size_t element_bytes() const;
};

struct MasterKey {
  BigInt p_prime;
  BigInt q_prime;
};

struct KeyPair {
  BigInt pk;  // h = g^sk mod N^2
  BigInt sk;  // uniform in Z_{N^2}
};

struct Ciphertext {
  BigInt a;
  BigInt b;
  KeyId key_id;

  bool operator==(const Ciphertext&) const = default;
};

// Exponentiation of a fixed base via a radix-2^w table of precomputed powers.
// Exponents wider than the table fall back to mpz_powm.
class FixedBaseTable {
 public:
  FixedBaseTable(const BigInt& base, const BigInt& modulus,
                 std::size_t max_exponent_bits);

  BigInt pow(const BigInt& exponent) const;
  const BigInt& base() const { return base_; }

 private:
  BigInt base_;
  BigInt modulus_;
  unsigned window_;
  std::size_t digits_;
  // table_[i * (2^w - 1) + (d - 1)] = base^(d * 2^(w*i)).
  std::vector<BigInt> table_;
};

// Setup(k): safe primes p = 2p'+1, q = 2q'+1 of k_bits each, N = pq, and a
// generator g of order N p' q'. Throws GenerationError when the search budget
// runs out.
std::pair<PublicParams, MasterKey> setup(unsigned k_bits, RandomSource& rng);

KeyPair keygen(const PublicParams& pp, RandomSource& rng);

// Reference encryption (plain modular exponentiation). See Encryptor for the
// precomputed path used by the protocols.
Ciphertext enc(const PublicParams& pp, const BigInt& pk, const BigInt& m,
               RandomSource& rng, const KeyId& key_id = {});

BigInt dec(const PublicParams& pp, const BigInt& sk, const Ciphertext& ct);

BigInt mdec(const PublicParams& pp, const BigInt& pk, const MasterKey& mk,
            const Ciphertext& ct);

// Component-wise product: Enc(m1) * Enc(m2) = Enc(m1 + m2).
Ciphertext add(const PublicParams& pp, const Ciphertext& c1,
               const Ciphertext& c2);
// Component-wise inverse: Enc(m) -> Enc(-m).
Ciphertext neg(const PublicParams& pp, const Ciphertext& c);
// c^k for a signed integer k: Enc(m) -> Enc(k m).
Ciphertext exp(const PublicParams& pp, const Ciphertext& c, const BigInt& k);

// Validity of a ciphertext as an element pair of Z*_{N^2}.
bool well_formed(const PublicParams& pp, const Ciphertext& ct);

// Checks the PublicParams / MasterKey invariants; throws ParameterError.
void validate(const PublicParams& pp, const MasterKey& mk);

// Precomputed encryption under one public key.
class Encryptor {
 public:
  Encryptor(const PublicParams& pp, BigInt pk, KeyId key_id,
            std::shared_ptr<const FixedBaseTable> g_table);

  Ciphertext encrypt(const BigInt& m, RandomSource& rng) const;
  const BigInt& pk() const { return pk_; }
  const KeyId& key_id() const { return key_id_; }

 private:
  PublicParams pp_;
  BigInt pk_;
  KeyId key_id_;
  std::shared_ptr<const FixedBaseTable> g_table_;
  FixedBaseTable h_table_;
};

std::shared_ptr<const FixedBaseTable> make_generator_table(
    const PublicParams& pp);

// Master decryption with the per-setup constants (kconst^-1, (p'q')^-1) and
// per-key a mod N cached. Produces exactly mdec().
class MasterDecryptor {
 public:
  MasterDecryptor(const PublicParams& pp, const MasterKey& mk,
                  std::shared_ptr<const FixedBaseTable> g_table);

  BigInt decrypt(const BigInt& pk, const Ciphertext& ct);

 private:
  const BigInt& secret_mod_n(const BigInt& pk);

  PublicParams pp_;
  BigInt order_;  // p'q'
  BigInt kconst_inv_;
  BigInt delta_;
  std::shared_ptr<const FixedBaseTable> g_table_;
  std::map<BigInt, BigInt> secret_cache_;
};

// JSON with decimal-string big integers.
inline constexpr int kKeyFormatVersion = 1;
nlohmann::json to_json(const PublicParams& pp);
nlohmann::json to_json(const MasterKey& mk);
nlohmann::json to_json(const KeyPair& kp);
nlohmann::json to_json(const Ciphertext& ct);
PublicParams public_params_from_json(const nlohmann::json& j);
MasterKey master_key_from_json(const nlohmann::json& j);
KeyPair key_pair_from_json(const nlohmann::json& j);
Ciphertext ciphertext_from_json(const nlohmann::json& j);

}  // namespace ssxgb

#endif  // SSXGB_BCP_H_
