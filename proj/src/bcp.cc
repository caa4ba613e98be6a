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

#include "ssxgb/bcp.h"

#include <array>
#include <stdexcept>
#include <string>

#include "ssxgb/errors.h"

namespace ssxgb {

namespace {

constexpr int kPrimalityReps = 64;
constexpr int kSafePrimeAttempts = 4000;
constexpr int kGeneratorAttempts = 256;
constexpr unsigned kSieveWindow = 1u << 16;

const std::vector<unsigned>& small_primes() {
  static const std::vector<unsigned> primes = [] {
    constexpr unsigned kLimit = 4096;
    std::vector<bool> composite(kLimit, false);
    std::vector<unsigned> out;
    for (unsigned i = 3; i < kLimit; i += 2) {
      if (composite[i]) continue;
      out.push_back(i);
      for (unsigned j = i * i; j < kLimit; j += 2 * i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

BigInt powm(const BigInt& base, const BigInt& e, const BigInt& mod) {
  BigInt out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), mod.get_mpz_t());
  return out;
}

BigInt invert(const BigInt& x, const BigInt& mod) {
  BigInt out;
  if (mpz_invert(out.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t()) == 0) {
    throw DecryptionError("element not invertible modulo N^2");
  }
  return out;
}

bool fermat_base2(const BigInt& n) {
  return powm(BigInt(2), n - 1, n) == 1;
}

// Safe prime p of exactly `bits` bits with the top two bits set, so that the
// product of two such primes has exactly 2*bits bits.
BigInt random_safe_prime(unsigned bits, RandomSource& rng) {
  const unsigned sub_bits = bits - 1;  // bit length of p' = (p - 1) / 2
  const auto& primes = small_primes();
  std::vector<unsigned> residues(primes.size());
  for (int attempt = 0; attempt < kSafePrimeAttempts; ++attempt) {
    BigInt start = rng.bits(sub_bits);
    mpz_setbit(start.get_mpz_t(), sub_bits - 1);
    mpz_setbit(start.get_mpz_t(), sub_bits - 2);
    mpz_setbit(start.get_mpz_t(), 0);
    for (std::size_t i = 0; i < primes.size(); ++i) {
      residues[i] = static_cast<unsigned>(
          mpz_fdiv_ui(start.get_mpz_t(), primes[i]));
    }
    for (unsigned delta = 0; delta < kSieveWindow; delta += 2) {
      bool survives = true;
      for (std::size_t i = 0; i < primes.size(); ++i) {
        const unsigned s = primes[i];
        const unsigned r = (residues[i] + delta) % s;
        // p' divisible by s, or p = 2p' + 1 divisible by s.
        if (r == 0 || r == (s - 1) / 2) {
          survives = false;
          break;
        }
      }
      if (!survives) continue;
      BigInt sub = start + delta;
      if (bit_length(sub) != sub_bits) break;
      BigInt p = 2 * sub + 1;
      if (!fermat_base2(p) || !fermat_base2(sub)) continue;
      if (mpz_probab_prime_p(sub.get_mpz_t(), kPrimalityReps) == 0) continue;
      if (mpz_probab_prime_p(p.get_mpz_t(), kPrimalityReps) == 0) continue;
      return p;
    }
  }
  throw GenerationError("safe prime search exhausted its retry budget for " +
                        std::to_string(bits) + "-bit primes");
}

// L(u) = (u - 1) / N, defined when u = 1 (mod N).
BigInt ell(const BigInt& u, const BigInt& n) {
  BigInt t = u - 1;
  if (mpz_divisible_p(t.get_mpz_t(), n.get_mpz_t()) == 0) {
    throw DecryptionError("value is not of the form 1 + xN");
  }
  BigInt out;
  mpz_divexact(out.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
  return out;
}

BigInt mod(const BigInt& x, const BigInt& m) {
  BigInt out;
  mpz_mod(out.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return out;
}

void check_plaintext(const PublicParams& pp, const BigInt& m) {
  if (m < 0 || m >= pp.n) {
    throw DomainError("plaintext outside Z_N");
  }
}

BigInt master_decrypt(const PublicParams& pp, const BigInt& order,
                      const BigInt& kconst_inv, const BigInt& delta,
                      const BigInt& a_mod_n, const Ciphertext& ct,
                      const FixedBaseTable* g_table) {
  const BigInt r_mod_n =
      mod(ell(powm(ct.a, order, pp.n_squared), pp.n) * kconst_inv, pp.n);
  const BigInt gamma = mod(a_mod_n * r_mod_n, pp.n);
  const BigInt g_gamma =
      g_table != nullptr ? g_table->pow(gamma) : powm(pp.g, gamma, pp.n_squared);
  const BigInt t = mod(ct.b * invert(g_gamma, pp.n_squared), pp.n_squared);
  return mod(ell(powm(t, order, pp.n_squared), pp.n) * delta, pp.n);
}

std::string to_dec(const BigInt& x) { return x.get_str(10); }

BigInt from_dec(const nlohmann::json& j) {
  BigInt out;
  if (out.set_str(j.get<std::string>(), 10) != 0) {
    throw ParameterError("malformed decimal big integer");
  }
  return out;
}

void check_version(const nlohmann::json& j) {
  if (j.value("format_version", 0) != kKeyFormatVersion) {
    throw ParameterError("unsupported key format version");
  }
}

}  // namespace

std::size_t PublicParams::element_bytes() const {
  return (bit_length(n_squared) + 7) / 8;
}

std::size_t PublicParams::ciphertext_bytes() const {
  return 2 * element_bytes();
}

FixedBaseTable::FixedBaseTable(const BigInt& base, const BigInt& modulus,
                               std::size_t max_exponent_bits)
    : base_(base), modulus_(modulus) {
  window_ = bit_length(modulus) <= 2048 ? 5 : 4;
  digits_ = (max_exponent_bits + window_ - 1) / window_;
  const std::size_t per_digit = (std::size_t{1} << window_) - 1;
  table_.resize(digits_ * per_digit);
  BigInt digit_base = mod(base, modulus);
  for (std::size_t i = 0; i < digits_; ++i) {
    BigInt* row = &table_[i * per_digit];
    row[0] = digit_base;
    for (std::size_t d = 1; d < per_digit; ++d) {
      row[d] = mod(row[d - 1] * digit_base, modulus);
    }
    digit_base = mod(row[per_digit - 1] * digit_base, modulus);
  }
}

BigInt FixedBaseTable::pow(const BigInt& exponent) const {
  if (exponent < 0) throw std::invalid_argument("negative exponent");
  const std::size_t ebits = bit_length(exponent);
  if (ebits > digits_ * window_) return powm(base_, exponent, modulus_);
  const std::size_t per_digit = (std::size_t{1} << window_) - 1;
  mpz_t acc, tmp;
  mpz_init_set_ui(acc, 1);
  mpz_init(tmp);
  const mpz_srcptr e = exponent.get_mpz_t();
  for (std::size_t i = 0; i * window_ < ebits; ++i) {
    unsigned d = 0;
    for (unsigned b = 0; b < window_; ++b) {
      d |= static_cast<unsigned>(mpz_tstbit(e, i * window_ + b)) << b;
    }
    if (d == 0) continue;
    mpz_mul(tmp, acc, table_[i * per_digit + d - 1].get_mpz_t());
    mpz_mod(acc, tmp, modulus_.get_mpz_t());
  }
  BigInt out(acc);
  mpz_clear(acc);
  mpz_clear(tmp);
  return out;
}

std::pair<PublicParams, MasterKey> setup(unsigned k_bits, RandomSource& rng) {
  if (k_bits < 32) throw ParameterError("k_bits must be at least 32");
  const BigInt p = random_safe_prime(k_bits, rng);
  BigInt q;
  do {
    q = random_safe_prime(k_bits, rng);
  } while (q == p);

  PublicParams pp;
  pp.k_bits = k_bits;
  pp.n = p * q;
  pp.n_squared = pp.n * pp.n;
  MasterKey mk{(p - 1) / 2, (q - 1) / 2};
  const BigInt order = mk.p_prime * mk.q_prime;

  for (int attempt = 0; attempt < kGeneratorAttempts; ++attempt) {
    const BigInt alpha = rng.in_range(2, pp.n_squared - 1);
    BigInt gcd;
    mpz_gcd(gcd.get_mpz_t(), alpha.get_mpz_t(), pp.n.get_mpz_t());
    if (gcd != 1) continue;
    const BigInt g = mod(alpha * alpha, pp.n_squared);
    const BigInt u = powm(g, order, pp.n_squared);
    if (u == 1) continue;
    BigInt t = u - 1;
    if (mpz_divisible_p(t.get_mpz_t(), pp.n.get_mpz_t()) == 0) continue;
    const BigInt kconst = t / pp.n;
    mpz_gcd(gcd.get_mpz_t(), kconst.get_mpz_t(), pp.n.get_mpz_t());
    if (gcd != 1) continue;
    // Full order N p' q': neither g^{N p'} nor g^{N q'} may be the identity.
    if (powm(g, pp.n * mk.p_prime, pp.n_squared) == 1) continue;
    if (powm(g, pp.n * mk.q_prime, pp.n_squared) == 1) continue;
    pp.g = g;
    pp.kconst = kconst;
    return {pp, mk};
  }
  throw GenerationError("no generator of order N p' q' found");
}

KeyPair keygen(const PublicParams& pp, RandomSource& rng) {
  KeyPair kp;
  kp.sk = rng.below(pp.n_squared);
  kp.pk = powm(pp.g, kp.sk, pp.n_squared);
  return kp;
}

Ciphertext enc(const PublicParams& pp, const BigInt& pk, const BigInt& m,
               RandomSource& rng, const KeyId& key_id) {
  check_plaintext(pp, m);
  const BigInt r = rng.below(pp.n_squared);
  Ciphertext ct;
  ct.a = powm(pp.g, r, pp.n_squared);
  ct.b = mod(powm(pk, r, pp.n_squared) * (1 + m * pp.n), pp.n_squared);
  ct.key_id = key_id;
  return ct;
}

BigInt dec(const PublicParams& pp, const BigInt& sk, const Ciphertext& ct) {
  if (!well_formed(pp, ct)) throw DecryptionError("malformed ciphertext");
  const BigInt mask = powm(ct.a, sk, pp.n_squared);
  const BigInt x = mod(ct.b * invert(mask, pp.n_squared), pp.n_squared);
  return ell(x, pp.n);
}

BigInt mdec(const PublicParams& pp, const BigInt& pk, const MasterKey& mk,
            const Ciphertext& ct) {
  if (!well_formed(pp, ct)) throw DecryptionError("malformed ciphertext");
  const BigInt order = mk.p_prime * mk.q_prime;
  BigInt kconst_inv, delta;
  if (mpz_invert(kconst_inv.get_mpz_t(), pp.kconst.get_mpz_t(),
                 pp.n.get_mpz_t()) == 0) {
    throw ParameterError("kconst is not invertible mod N");
  }
  if (mpz_invert(delta.get_mpz_t(), order.get_mpz_t(), pp.n.get_mpz_t()) ==
      0) {
    throw ParameterError("p'q' is not invertible mod N");
  }
  const BigInt a_mod_n =
      mod(ell(powm(pk, order, pp.n_squared), pp.n) * kconst_inv, pp.n);
  return master_decrypt(pp, order, kconst_inv, delta, a_mod_n, ct, nullptr);
}

Ciphertext add(const PublicParams& pp, const Ciphertext& c1,
               const Ciphertext& c2) {
  if (c1.key_id != c2.key_id) {
    throw KeyMismatchError("add: ciphertexts under different keys (" +
                           c1.key_id + " vs " + c2.key_id + ")");
  }
  return Ciphertext{mod(c1.a * c2.a, pp.n_squared),
                    mod(c1.b * c2.b, pp.n_squared), c1.key_id};
}

Ciphertext neg(const PublicParams& pp, const Ciphertext& c) {
  // One inversion for both components: (AB)^-1 * B = A^-1 and vice versa.
  const BigInt inv = invert(mod(c.a * c.b, pp.n_squared), pp.n_squared);
  return Ciphertext{mod(inv * c.b, pp.n_squared), mod(inv * c.a, pp.n_squared),
                    c.key_id};
}

Ciphertext exp(const PublicParams& pp, const Ciphertext& c, const BigInt& k) {
  if (k < 0) {
    const Ciphertext n = neg(pp, c);
    const BigInt abs_k = -k;
    return Ciphertext{powm(n.a, abs_k, pp.n_squared),
                      powm(n.b, abs_k, pp.n_squared), c.key_id};
  }
  return Ciphertext{powm(c.a, k, pp.n_squared), powm(c.b, k, pp.n_squared),
                    c.key_id};
}

bool well_formed(const PublicParams& pp, const Ciphertext& ct) {
  if (ct.a <= 0 || ct.a >= pp.n_squared) return false;
  if (ct.b <= 0 || ct.b >= pp.n_squared) return false;
  BigInt gcd;
  mpz_gcd(gcd.get_mpz_t(), ct.a.get_mpz_t(), pp.n.get_mpz_t());
  return gcd == 1;
}

void validate(const PublicParams& pp, const MasterKey& mk) {
  if ((2 * mk.p_prime + 1) * (2 * mk.q_prime + 1) != pp.n) {
    throw ParameterError("(2p'+1)(2q'+1) != N");
  }
  if (pp.n_squared != pp.n * pp.n) throw ParameterError("N^2 mismatch");
  if (mpz_odd_p(pp.n.get_mpz_t()) == 0) throw ParameterError("N is even");
  const std::size_t nbits = bit_length(pp.n);
  if (nbits < 2 * pp.k_bits - 1 || nbits > 2 * pp.k_bits) {
    throw ParameterError("N bit length inconsistent with k_bits");
  }
  if (pp.kconst < 1 || pp.kconst >= pp.n) {
    throw ParameterError("kconst outside [1, N-1]");
  }
  if (powm(pp.g, mk.p_prime * mk.q_prime, pp.n_squared) !=
      1 + pp.kconst * pp.n) {
    throw ParameterError("g^{p'q'} != 1 + kconst N");
  }
}

std::shared_ptr<const FixedBaseTable> make_generator_table(
    const PublicParams& pp) {
  return std::make_shared<const FixedBaseTable>(pp.g, pp.n_squared,
                                                bit_length(pp.n_squared));
}

Encryptor::Encryptor(const PublicParams& pp, BigInt pk, KeyId key_id,
                     std::shared_ptr<const FixedBaseTable> g_table)
    : pp_(pp),
      pk_(std::move(pk)),
      key_id_(std::move(key_id)),
      g_table_(std::move(g_table)),
      h_table_(pk_, pp.n_squared, bit_length(pp.n_squared)) {
  if (!g_table_) g_table_ = make_generator_table(pp_);
}

Ciphertext Encryptor::encrypt(const BigInt& m, RandomSource& rng) const {
  check_plaintext(pp_, m);
  const BigInt r = rng.below(pp_.n_squared);
  Ciphertext ct;
  ct.a = g_table_->pow(r);
  ct.b = mod(h_table_.pow(r) * (1 + m * pp_.n), pp_.n_squared);
  ct.key_id = key_id_;
  return ct;
}

MasterDecryptor::MasterDecryptor(const PublicParams& pp, const MasterKey& mk,
                                 std::shared_ptr<const FixedBaseTable> g_table)
    : pp_(pp), order_(mk.p_prime * mk.q_prime), g_table_(std::move(g_table)) {
  if (mpz_invert(kconst_inv_.get_mpz_t(), pp_.kconst.get_mpz_t(),
                 pp_.n.get_mpz_t()) == 0) {
    throw ParameterError("kconst is not invertible mod N");
  }
  if (mpz_invert(delta_.get_mpz_t(), order_.get_mpz_t(), pp_.n.get_mpz_t()) ==
      0) {
    throw ParameterError("p'q' is not invertible mod N");
  }
  if (!g_table_) g_table_ = make_generator_table(pp_);
}

const BigInt& MasterDecryptor::secret_mod_n(const BigInt& pk) {
  auto it = secret_cache_.find(pk);
  if (it != secret_cache_.end()) return it->second;
  BigInt a_mod_n =
      mod(ell(powm(pk, order_, pp_.n_squared), pp_.n) * kconst_inv_, pp_.n);
  return secret_cache_.emplace(pk, std::move(a_mod_n)).first->second;
}

BigInt MasterDecryptor::decrypt(const BigInt& pk, const Ciphertext& ct) {
  if (!well_formed(pp_, ct)) throw DecryptionError("malformed ciphertext");
  return master_decrypt(pp_, order_, kconst_inv_, delta_, secret_mod_n(pk), ct,
                        g_table_.get());
}

nlohmann::json to_json(const PublicParams& pp) {
  return {{"format_version", kKeyFormatVersion},
          {"type", "bcp_public_params"},
          {"N", to_dec(pp.n)},
          {"g", to_dec(pp.g)},
          {"kconst", to_dec(pp.kconst)},
          {"k_bits", pp.k_bits}};
}

nlohmann::json to_json(const MasterKey& mk) {
  return {{"format_version", kKeyFormatVersion},
          {"type", "bcp_master_key"},
          {"p_prime", to_dec(mk.p_prime)},
          {"q_prime", to_dec(mk.q_prime)}};
}

nlohmann::json to_json(const KeyPair& kp) {
  return {{"format_version", kKeyFormatVersion},
          {"type", "bcp_key_pair"},
          {"pk", to_dec(kp.pk)},
          {"sk", to_dec(kp.sk)}};
}

nlohmann::json to_json(const Ciphertext& ct) {
  return {{"A", to_dec(ct.a)}, {"B", to_dec(ct.b)}, {"key_id", ct.key_id}};
}

PublicParams public_params_from_json(const nlohmann::json& j) {
  check_version(j);
  PublicParams pp;
  pp.n = from_dec(j.at("N"));
  pp.n_squared = pp.n * pp.n;
  pp.g = from_dec(j.at("g"));
  pp.kconst = from_dec(j.at("kconst"));
  pp.k_bits = j.at("k_bits").get<unsigned>();
  return pp;
}

MasterKey master_key_from_json(const nlohmann::json& j) {
  check_version(j);
  return MasterKey{from_dec(j.at("p_prime")), from_dec(j.at("q_prime"))};
}

KeyPair key_pair_from_json(const nlohmann::json& j) {
  check_version(j);
  return KeyPair{from_dec(j.at("pk")), from_dec(j.at("sk"))};
}

Ciphertext ciphertext_from_json(const nlohmann::json& j) {
  return Ciphertext{from_dec(j.at("A")), from_dec(j.at("B")),
                    j.at("key_id").get<std::string>()};
}

}  // namespace ssxgb
