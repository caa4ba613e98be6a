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

#ifndef SSXGB_RANDOM_H_
#define SSXGB_RANDOM_H_

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <string_view>

namespace ssxgb {

using BigInt = mpz_class;

// Derives an independent 64-bit stream seed from a run seed and a label
// (SHA-256 of both, truncated). Every entity and every sampling step gets its
// own labelled stream so that adding a draw in one place never shifts another.
uint64_t derive_seed(uint64_t seed, std::string_view label);

// Deterministic randomness source. Simulation-grade: reproducibility of
// transcripts matters more here than unpredictability.
class RandomSource {
 public:
  explicit RandomSource(uint64_t seed) : engine_(seed) {}
  RandomSource(uint64_t seed, std::string_view label)
      : engine_(derive_seed(seed, label)) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 2^bits).
  BigInt bits(unsigned bits);
  // Uniform in [0, bound). bound must be positive.
  BigInt below(const BigInt& bound);
  // Uniform in [lo, hi], inclusive.
  BigInt in_range(const BigInt& lo, const BigInt& hi);
  bool coin() { return (engine_() & 1u) != 0; }
  double uniform01();
  double normal(double mean, double stddev);
  // Uniform in [0, n).
  std::size_t index(std::size_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::size_t bit_length(const BigInt& x);

}  // namespace ssxgb

#endif  // SSXGB_RANDOM_H_
