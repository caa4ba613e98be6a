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

#include <cmath>
#include <string>

#include "ssxgb/errors.h"

namespace ssxgb {

void FixedPointConfig::validate(const BigInt& n) const {
  if (scale_exp < 0 || quotient_scale_exp < 0 || bound_exp <= 0 ||
      mask_bits <= 0) {
    throw OverflowError("fixed-point exponents must be positive");
  }
  BigInt headroom = 1;
  headroom <<= static_cast<unsigned>(bound_exp + mask_bits + 2);
  if (!(headroom < n / 4)) {
    throw OverflowError("2^(bound_exp + mask_bits + 2) must be below N/4 (" +
                        std::to_string(bound_exp + mask_bits + 2) +
                        " bits vs N of " + std::to_string(bit_length(n)) +
                        " bits)");
  }
}

nlohmann::json to_json(const FixedPointConfig& cfg) {
  return {{"scale_exp", cfg.scale_exp},
          {"quotient_scale_exp", cfg.quotient_scale_exp},
          {"bound_exp", cfg.bound_exp},
          {"mask_bits", cfg.mask_bits}};
}

FixedPointConfig fixed_point_config_from_json(const nlohmann::json& j) {
  FixedPointConfig cfg;
  cfg.scale_exp = j.value("scale_exp", cfg.scale_exp);
  cfg.quotient_scale_exp = j.value("quotient_scale_exp", cfg.quotient_scale_exp);
  cfg.bound_exp = j.value("bound_exp", cfg.bound_exp);
  cfg.mask_bits = j.value("mask_bits", cfg.mask_bits);
  return cfg;
}

BigInt encode(double v, int f, const BigInt& n, int bound_exp) {
  if (!std::isfinite(v)) throw OverflowError("cannot encode NaN or Inf");
  const double scaled = std::nearbyint(std::ldexp(v, f));
  BigInt raw(scaled);  // exact: scaled is an integral double
  BigInt bound = 1;
  bound <<= static_cast<unsigned>(bound_exp);
  if (abs(raw) >= bound) {
    throw OverflowError("encoded magnitude exceeds 2^" +
                        std::to_string(bound_exp));
  }
  return from_signed(raw, n);
}

double decode(const BigInt& raw, int f, const BigInt& n) {
  const BigInt v = to_signed(raw, n);
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, v.get_mpz_t());
  return std::ldexp(mantissa, static_cast<int>(exponent) - f);
}

BigInt to_signed(const BigInt& raw, const BigInt& n) {
  if (raw > n / 2) return raw - n;
  return raw;
}

BigInt from_signed(const BigInt& v, const BigInt& n) {
  BigInt out;
  mpz_mod(out.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
  return out;
}

BigInt rounded_quotient(const BigInt& num, const BigInt& den, int f) {
  if (den == 0) throw std::domain_error("rounded_quotient: zero denominator");
  BigInt scaled = num;
  scaled <<= static_cast<unsigned>(f);
  BigInt a = abs(scaled);
  BigInt b = abs(den);
  // floor((2a + b) / 2b) = round-half-up of a/b.
  BigInt q = (2 * a + b) / (2 * b);
  const bool negative = (sgn(scaled) < 0) != (sgn(den) < 0);
  return negative ? BigInt(-q) : q;
}

}  // namespace ssxgb
