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

#ifndef SSXGB_ENCODING_H_
#define SSXGB_ENCODING_H_

// Fixed-point encoding of signed reals into Z_N.
//
// A real v at scale s is carried as raw = round(v * 2^s), negatives in
// N-complement. Scales are public metadata that travel next to each
// ciphertext; the protocols check and combine them.

#include "json.hpp"
#include "ssxgb/bcp.h"

namespace ssxgb {

struct FixedPointConfig {
  // Scale f for encoded operands (gradients, predictions, constants).
  int scale_exp = 24;
  // Scale f_q of Div quotients.
  int quotient_scale_exp = 24;
  // Encoded magnitudes must stay below 2^bound_exp.
  int bound_exp = 256;
  // Width of the statistical blinds the interactive protocols draw.
  int mask_bits = 40;

  // Requires 2^(bound_exp + mask_bits + 2) < N / 4. Throws OverflowError.
  void validate(const BigInt& n) const;
};

nlohmann::json to_json(const FixedPointConfig& cfg);
FixedPointConfig fixed_point_config_from_json(const nlohmann::json& j);

// round(v * 2^f) mod N. Throws OverflowError for NaN/Inf or when
// |v| * 2^f >= 2^bound_exp.
BigInt encode(double v, int f, const BigInt& n, int bound_exp);
// Signed value of raw (raw > N/2 is negative), divided by 2^f.
double decode(const BigInt& raw, int f, const BigInt& n);

// Exact conversions between a signed integer and its Z_N representative.
BigInt to_signed(const BigInt& raw, const BigInt& n);
BigInt from_signed(const BigInt& v, const BigInt& n);

// round(2^f * num / den) for integers, ties away from zero.
BigInt rounded_quotient(const BigInt& num, const BigInt& den, int f);

struct ScaledCiphertext {
  Ciphertext ct;
  int scale = 0;
};

}  // namespace ssxgb

#endif  // SSXGB_ENCODING_H_
