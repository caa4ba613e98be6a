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

#include <gtest/gtest.h>

#include <set>

#include "ssxgb/errors.h"
#include "test_support.h"

namespace ssxgb {
namespace {

using testing::params;

// Decryption written out from the definition: L(B / A^sk mod N^2).
BigInt oracle_dec(const PublicParams& pp, const BigInt& sk,
                  const Ciphertext& ct) {
  BigInt a_pow, inv, u;
  mpz_powm(a_pow.get_mpz_t(), ct.a.get_mpz_t(), sk.get_mpz_t(),
           pp.n_squared.get_mpz_t());
  mpz_invert(inv.get_mpz_t(), a_pow.get_mpz_t(), pp.n_squared.get_mpz_t());
  u = (ct.b * inv) % pp.n_squared;
  return (u - 1) / pp.n;
}

bool is_prime(const BigInt& v) {
  return mpz_probab_prime_p(v.get_mpz_t(), 40) != 0;
}

class SetupSizes : public ::testing::TestWithParam<unsigned> {};

TEST_P(SetupSizes, SafePrimesAndGenerator) {
  const unsigned k = GetParam();
  RandomSource rng(k, "setup-test");
  const auto [pp, mk] = setup(k, rng);
  const BigInt p = 2 * mk.p_prime + 1, q = 2 * mk.q_prime + 1;
  EXPECT_EQ(p * q, pp.n);
  EXPECT_TRUE(is_prime(mk.p_prime));
  EXPECT_TRUE(is_prime(mk.q_prime));
  EXPECT_TRUE(is_prime(p));
  EXPECT_TRUE(is_prime(q));
  EXPECT_EQ(p % 4, 3);
  EXPECT_EQ(q % 4, 3);
  EXPECT_GE(bit_length(pp.n), 2 * k - 1);
  EXPECT_LE(bit_length(pp.n), 2 * k);
  EXPECT_EQ(pp.n_squared, pp.n * pp.n);
  BigInt gp;
  const BigInt order = mk.p_prime * mk.q_prime;
  mpz_powm(gp.get_mpz_t(), pp.g.get_mpz_t(), order.get_mpz_t(),
           pp.n_squared.get_mpz_t());
  EXPECT_EQ(gp, (1 + pp.kconst * pp.n) % pp.n_squared);
  EXPECT_GE(pp.kconst, 1);
  EXPECT_LT(pp.kconst, pp.n);
  EXPECT_NO_THROW(validate(pp, mk));
}

INSTANTIATE_TEST_SUITE_P(Bits, SetupSizes, ::testing::Values(32u, 64u, 128u, 256u));

TEST(Setup, RejectsTinyParameters) {
  RandomSource rng(1);
  EXPECT_THROW(setup(16, rng), ParameterError);
}

TEST(Setup, ProductionSizeHasFullLengthModulus) {
  const auto& prm = params(1024);
  EXPECT_GE(bit_length(prm.pp.n), 1023u);
  EXPECT_LE(bit_length(prm.pp.n), 1024u);
}

TEST(Validate, DetectsTamperedParameters) {
  auto prm = params(512);
  PublicParams pp = prm.pp;
  pp.kconst += 1;
  EXPECT_THROW(validate(pp, prm.mk), ParameterError);
  MasterKey mk = prm.mk;
  mk.p_prime += 2;
  EXPECT_THROW(validate(prm.pp, mk), ParameterError);
}

TEST(Keygen, PublicKeyMatchesSecret) {
  const auto& prm = params(512);
  RandomSource rng(7);
  const KeyPair a = keygen(prm.pp, rng);
  const KeyPair b = keygen(prm.pp, rng);
  EXPECT_NE(a.sk, b.sk);
  BigInt h;
  mpz_powm(h.get_mpz_t(), prm.pp.g.get_mpz_t(), a.sk.get_mpz_t(),
           prm.pp.n_squared.get_mpz_t());
  EXPECT_EQ(h, a.pk);
  EXPECT_LT(a.sk, prm.pp.n_squared);
}

TEST(Enc, RoundTripOf42AndBoundaries) {
  const auto& prm = params(512);
  RandomSource rng(8);
  const KeyPair kp = keygen(prm.pp, rng);
  for (const BigInt& m : {BigInt(42), BigInt(0), BigInt(prm.pp.n - 1)}) {
    const Ciphertext ct = enc(prm.pp, kp.pk, m, rng);
    EXPECT_EQ(dec(prm.pp, kp.sk, ct), m);
    EXPECT_EQ(mdec(prm.pp, kp.pk, prm.mk, ct), m);
  }
}

TEST(Enc, RejectsOutOfDomain) {
  const auto& prm = params(512);
  RandomSource rng(9);
  const KeyPair kp = keygen(prm.pp, rng);
  EXPECT_THROW(enc(prm.pp, kp.pk, prm.pp.n, rng), DomainError);
  EXPECT_THROW(enc(prm.pp, kp.pk, BigInt(-1), rng), DomainError);
  Encryptor e(prm.pp, kp.pk, "u", prm.table);
  EXPECT_THROW(e.encrypt(prm.pp.n, rng), DomainError);
}

TEST(Enc, ProbabilisticHundredZerosDistinct) {
  const auto& prm = params(512);
  RandomSource rng(10);
  const KeyPair kp = keygen(prm.pp, rng);
  Encryptor e(prm.pp, kp.pk, "u", prm.table);
  std::set<std::pair<BigInt, BigInt>> seen;
  for (int i = 0; i < 100; ++i) {
    const Ciphertext ct = e.encrypt(0, rng);
    EXPECT_TRUE(seen.insert({ct.a, ct.b}).second);
    EXPECT_TRUE(well_formed(prm.pp, ct));
  }
}

TEST(Enc, TwoEncryptionsDifferAndBothDecrypt) {
  const auto& prm = params(512);
  RandomSource rng(11);
  const KeyPair kp = keygen(prm.pp, rng);
  const BigInt m = rng.below(prm.pp.n);
  const Ciphertext c1 = enc(prm.pp, kp.pk, m, rng);
  const Ciphertext c2 = enc(prm.pp, kp.pk, m, rng);
  EXPECT_NE(c1, c2);
  EXPECT_EQ(dec(prm.pp, kp.sk, c1), m);
  EXPECT_EQ(dec(prm.pp, kp.sk, c2), m);
}

// Roundtrip property over random plaintexts, both decryption paths, against
// the definitional decryption.
TEST(EncProperty, RoundTripMatchesOracle) {
  const auto& prm = params(512);
  RandomSource rng(12);
  const KeyPair kp = keygen(prm.pp, rng);
  Encryptor fast(prm.pp, kp.pk, "u", prm.table);
  MasterDecryptor master(prm.pp, prm.mk, prm.table);
  for (int i = 0; i < 600; ++i) {
    const BigInt m = rng.below(prm.pp.n);
    const Ciphertext ct =
        i % 2 == 0 ? fast.encrypt(m, rng) : enc(prm.pp, kp.pk, m, rng);
    ASSERT_EQ(oracle_dec(prm.pp, kp.sk, ct), m);
    ASSERT_EQ(dec(prm.pp, kp.sk, ct), m);
    ASSERT_EQ(mdec(prm.pp, kp.pk, prm.mk, ct), m);
    ASSERT_EQ(master.decrypt(kp.pk, ct), m);
  }
}

TEST(Dec, WrongKeyFailsOrDiffers) {
  const auto& prm = params(512);
  RandomSource rng(13);
  const KeyPair a = keygen(prm.pp, rng), b = keygen(prm.pp, rng);
  const Ciphertext ct = enc(prm.pp, a.pk, 1234, rng);
  try {
    EXPECT_NE(dec(prm.pp, b.sk, ct), 1234);
  } catch (const DecryptionError&) {
    SUCCEED();
  }
}

TEST(Mdec, WorksForEveryUser) {
  const auto& prm = params(512);
  RandomSource rng(14);
  const KeyPair u1 = keygen(prm.pp, rng), u2 = keygen(prm.pp, rng);
  EXPECT_EQ(mdec(prm.pp, u1.pk, prm.mk, enc(prm.pp, u1.pk, 7, rng)), 7);
  EXPECT_EQ(mdec(prm.pp, u2.pk, prm.mk, enc(prm.pp, u2.pk, 7, rng)), 7);
}

TEST(Mdec, JointKeyAgreesWithSummedSecrets) {
  const auto& prm = params(512);
  RandomSource rng(15);
  const KeyPair u1 = keygen(prm.pp, rng), u2 = keygen(prm.pp, rng);
  const BigInt joint = (u1.pk * u2.pk) % prm.pp.n_squared;
  for (int i = 0; i < 50; ++i) {
    const BigInt m = rng.below(prm.pp.n);
    const Ciphertext ct = enc(prm.pp, joint, m, rng);
    EXPECT_EQ(dec(prm.pp, u1.sk + u2.sk, ct), m);
    EXPECT_EQ(mdec(prm.pp, joint, prm.mk, ct), m);
  }
}

TEST(HomomorphismProperty, AddNegExpMatchModularArithmetic) {
  const auto& prm = params(512);
  const BigInt& n = prm.pp.n;
  RandomSource rng(16);
  const KeyPair kp = keygen(prm.pp, rng);
  Encryptor e(prm.pp, kp.pk, "u", prm.table);
  auto mod = [&](BigInt v) {
    v %= n;
    if (v < 0) v += n;
    return v;
  };
  for (int i = 0; i < 500; ++i) {
    const BigInt m1 = rng.below(n), m2 = rng.below(n);
    BigInt k = BigInt(rng.bits(80)) - (BigInt(1) << 79);
    const Ciphertext c1 = e.encrypt(m1, rng), c2 = e.encrypt(m2, rng);
    ASSERT_EQ(dec(prm.pp, kp.sk, add(prm.pp, c1, c2)), mod(m1 + m2));
    ASSERT_EQ(dec(prm.pp, kp.sk, neg(prm.pp, c1)), mod(-m1));
    ASSERT_EQ(dec(prm.pp, kp.sk, exp(prm.pp, c1, k)), mod(m1 * k));
  }
}

TEST(Add, KeyMismatchThrows) {
  const auto& prm = params(512);
  RandomSource rng(17);
  const KeyPair a = keygen(prm.pp, rng), b = keygen(prm.pp, rng);
  const Ciphertext ca = enc(prm.pp, a.pk, 1, rng, "a");
  const Ciphertext cb = enc(prm.pp, b.pk, 1, rng, "b");
  EXPECT_THROW(add(prm.pp, ca, cb), KeyMismatchError);
}

TEST(Exp, SmallExamples) {
  const auto& prm = params(512);
  RandomSource rng(18);
  const KeyPair kp = keygen(prm.pp, rng);
  const Ciphertext c3 = enc(prm.pp, kp.pk, 3, rng);
  EXPECT_EQ(dec(prm.pp, kp.sk, exp(prm.pp, c3, 4)), 12);
  EXPECT_EQ(dec(prm.pp, kp.sk, exp(prm.pp, c3, 0)), 0);
  EXPECT_EQ(dec(prm.pp, kp.sk, exp(prm.pp, c3, -1)), prm.pp.n - 3);
}

TEST(WellFormed, RejectsOutOfRangeComponents) {
  const auto& prm = params(512);
  RandomSource rng(19);
  const KeyPair kp = keygen(prm.pp, rng);
  Ciphertext ct = enc(prm.pp, kp.pk, 5, rng);
  EXPECT_TRUE(well_formed(prm.pp, ct));
  Ciphertext bad = ct;
  bad.a = 0;
  EXPECT_FALSE(well_formed(prm.pp, bad));
  bad = ct;
  bad.b = prm.pp.n_squared;
  EXPECT_FALSE(well_formed(prm.pp, bad));
  bad = ct;
  bad.a = prm.pp.n;  // shares a factor with N
  EXPECT_FALSE(well_formed(prm.pp, bad));
}

TEST(FixedBaseTable, MatchesPowm) {
  const auto& prm = params(512);
  RandomSource rng(20);
  FixedBaseTable t(prm.pp.g, prm.pp.n_squared, 300);
  for (unsigned bits : {1u, 17u, 299u, 300u, 600u}) {
    const BigInt e = rng.bits(bits);
    BigInt want;
    mpz_powm(want.get_mpz_t(), prm.pp.g.get_mpz_t(), e.get_mpz_t(),
             prm.pp.n_squared.get_mpz_t());
    EXPECT_EQ(t.pow(e), want) << bits;
  }
}

TEST(Json, KeyMaterialRoundTrips) {
  const auto& prm = params(512);
  RandomSource rng(21);
  const KeyPair kp = keygen(prm.pp, rng);
  const Ciphertext ct = enc(prm.pp, kp.pk, 99, rng, "u");
  const PublicParams pp2 = public_params_from_json(to_json(prm.pp));
  EXPECT_EQ(pp2.n, prm.pp.n);
  EXPECT_EQ(pp2.g, prm.pp.g);
  EXPECT_EQ(pp2.kconst, prm.pp.kconst);
  EXPECT_EQ(pp2.k_bits, prm.pp.k_bits);
  const MasterKey mk2 = master_key_from_json(to_json(prm.mk));
  EXPECT_EQ(mk2.p_prime, prm.mk.p_prime);
  const KeyPair kp2 = key_pair_from_json(to_json(kp));
  EXPECT_EQ(kp2.sk, kp.sk);
  EXPECT_EQ(ciphertext_from_json(to_json(ct)), ct);
  EXPECT_EQ(to_json(prm.pp).at("format_version"), kKeyFormatVersion);
  EXPECT_TRUE(to_json(prm.pp).at("N").is_string());
}

TEST(Json, RejectsWrongVersion) {
  const auto& prm = params(512);
  nlohmann::json j = to_json(prm.pp);
  j["format_version"] = 99;
  EXPECT_THROW(public_params_from_json(j), Error);
}

TEST(CiphertextBytes, TwoFixedWidthElements) {
  const auto& prm = params(512);
  const std::size_t elem = (bit_length(prm.pp.n_squared) + 7) / 8;
  EXPECT_EQ(prm.pp.element_bytes(), elem);
  EXPECT_EQ(prm.pp.ciphertext_bytes(), 2 * elem);
}

}  // namespace
}  // namespace ssxgb
