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

#include "ssxgb/random.h"

#include <openssl/sha.h>

#include <cstring>
#include <stdexcept>
#include <string>

namespace ssxgb {

uint64_t derive_seed(uint64_t seed, std::string_view label) {
  std::string buf(sizeof(seed), '\0');
  std::memcpy(buf.data(), &seed, sizeof(seed));
  buf.append(label);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(buf.data()), buf.size(),
         digest);
  uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out = (out << 8) | digest[i];
  return out;
}

BigInt RandomSource::bits(unsigned bits) {
  BigInt out = 0;
  unsigned remaining = bits;
  while (remaining >= 64) {
    BigInt word;
    uint64_t w = engine_();
    mpz_import(word.get_mpz_t(), 1, 1, sizeof(w), 0, 0, &w);
    out = (out << 64) | word;
    remaining -= 64;
  }
  if (remaining > 0) {
    uint64_t w = engine_() >> (64 - remaining);
    BigInt word;
    mpz_import(word.get_mpz_t(), 1, 1, sizeof(w), 0, 0, &w);
    out = (out << remaining) | word;
  }
  return out;
}

BigInt RandomSource::below(const BigInt& bound) {
  if (bound <= 0) throw std::invalid_argument("RandomSource::below: bound <= 0");
  // Rejection sampling on the bit length of bound.
  const unsigned nbits = static_cast<unsigned>(bit_length(bound));
  while (true) {
    BigInt candidate = bits(nbits);
    if (candidate < bound) return candidate;
  }
}

BigInt RandomSource::in_range(const BigInt& lo, const BigInt& hi) {
  if (hi < lo) throw std::invalid_argument("RandomSource::in_range: hi < lo");
  return lo + below(hi - lo + 1);
}

double RandomSource::uniform01() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RandomSource::normal(double mean, double stddev) {
  return std::normal_distribution<double>(mean, stddev)(engine_);
}

std::size_t RandomSource::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("RandomSource::index: n == 0");
  return static_cast<std::size_t>(
      std::uniform_int_distribution<uint64_t>(0, n - 1)(engine_));
}

std::size_t bit_length(const BigInt& x) {
  if (x == 0) return 0;
  return mpz_sizeinbase(x.get_mpz_t(), 2);
}

}  // namespace ssxgb
