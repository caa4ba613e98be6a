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

#include "ssxgb/encoding.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ssxgb/errors.h"
#include "test_support.h"

namespace ssxgb {
namespace {

using testing::params;

const BigInt& modulus() { return params(512).pp.n; }

BigInt pow2(unsigned e) {
  BigInt v = 1;
  v <<= e;
  return v;
}

// Independent reference: exact rational arithmetic, half away from zero.
BigInt oracle_round_quotient(const BigInt& num, const BigInt& den, int f) {
  mpq_class q(num * pow2(f), den);
  q.canonicalize();
  const mpq_class half(1, 2);
  mpq_class shifted = abs(q) + half;
  BigInt fl = shifted.get_num() / shifted.get_den();  // floor for positives
  return sgn(q) < 0 ? BigInt(-fl) : fl;
}

TEST(Encode, ZeroAndMinusOne) {
  const BigInt& n = modulus();
  EXPECT_EQ(encode(0.0, 24, n, 256), 0);
  EXPECT_EQ(encode(-1.0, 24, n, 256), n - pow2(24));
  EXPECT_EQ(encode(1.0, 24, n, 256), pow2(24));
}

TEST(Decode, UnitValues) {
  const BigInt& n = modulus();
  EXPECT_DOUBLE_EQ(decode(pow2(24), 24, n), 1.0);
  EXPECT_DOUBLE_EQ(decode(n - pow2(24), 24, n), -1.0);
  EXPECT_DOUBLE_EQ(decode(0, 24, n), 0.0);
}

TEST(Encode, RejectsNonFiniteAndOverBound) {
  const BigInt& n = modulus();
  EXPECT_THROW(encode(std::nan(""), 24, n, 256), OverflowError);
  EXPECT_THROW(encode(std::numeric_limits<double>::infinity(), 24, n, 256),
               OverflowError);
  EXPECT_THROW(encode(1024.0, 24, n, 34), OverflowError);
  EXPECT_NO_THROW(encode(1023.0, 24, n, 34));
}

TEST(EncodeProperty, RoundTripWithinOneUlpOfScale) {
  const BigInt& n = modulus();
  RandomSource rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.uniform01() * 2.0 - 1.0) * 1000.0;
    const BigInt raw = encode(v, 24, n, 256);
    // Reference value: round(v * 2^24) in N-complement.
    const long long ref = std::llround(std::ldexp(v, 24));
    ASSERT_EQ(raw, from_signed(BigInt(static_cast<long>(ref)), n));
    ASSERT_LE(std::abs(decode(raw, 24, n) - v), std::ldexp(1.0, -24));
  }
}

TEST(EncodeProperty, OrderPreserved) {
  const BigInt& n = modulus();
  RandomSource rng(2);
  for (int i = 0; i < 500; ++i) {
    const double a = (rng.uniform01() - 0.5) * 200.0;
    const double b = (rng.uniform01() - 0.5) * 200.0;
    const BigInt sa = to_signed(encode(a, 24, n, 256), n);
    const BigInt sb = to_signed(encode(b, 24, n, 256), n);
    if (a < b) ASSERT_LE(sa, sb);
    if (a > b) ASSERT_GE(sa, sb);
  }
}

TEST(Signed, ComplementRoundTrip) {
  const BigInt& n = modulus();
  RandomSource rng(3);
  for (int i = 0; i < 500; ++i) {
    const BigInt v = BigInt(rng.bits(200)) - pow2(199);
    const BigInt raw = from_signed(v, n);
    ASSERT_GE(raw, 0);
    ASSERT_LT(raw, n);
    ASSERT_EQ(to_signed(raw, n), v);
  }
}

TEST(RoundedQuotient, MatchesRationalOracle) {
  RandomSource rng(4);
  for (int i = 0; i < 1000; ++i) {
    const BigInt num = BigInt(rng.bits(90)) - pow2(89);
    BigInt den = BigInt(rng.bits(60)) - pow2(59);
    if (den == 0) den = 1;
    const int f = static_cast<int>(rng.index(40));
    ASSERT_EQ(rounded_quotient(num, den, f), oracle_round_quotient(num, den, f));
  }
  EXPECT_EQ(rounded_quotient(1, 2, 0), 1);    // tie away from zero
  EXPECT_EQ(rounded_quotient(-1, 2, 0), -1);
  EXPECT_EQ(rounded_quotient(6, 3, 4), 32);
  EXPECT_THROW(rounded_quotient(1, 0, 4), std::domain_error);
}

TEST(FixedPointConfig, HeadroomRule) {
  FixedPointConfig cfg;
  EXPECT_NO_THROW(cfg.validate(params(512).pp.n));
  EXPECT_THROW(cfg.validate(params(256).pp.n), OverflowError);
  cfg.bound_exp = 100;
  EXPECT_NO_THROW(cfg.validate(params(256).pp.n));
  cfg.bound_exp = 0;
  EXPECT_THROW(cfg.validate(params(512).pp.n), OverflowError);
}

TEST(FixedPointConfig, JsonRoundTrip) {
  FixedPointConfig cfg;
  cfg.scale_exp = 20;
  cfg.quotient_scale_exp = 18;
  cfg.bound_exp = 200;
  cfg.mask_bits = 32;
  const FixedPointConfig back = fixed_point_config_from_json(to_json(cfg));
  EXPECT_EQ(back.scale_exp, 20);
  EXPECT_EQ(back.quotient_scale_exp, 18);
  EXPECT_EQ(back.bound_exp, 200);
  EXPECT_EQ(back.mask_bits, 32);
}

}  // namespace
}  // namespace ssxgb
