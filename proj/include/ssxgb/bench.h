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

#ifndef SSXGB_BENCH_H_
#define SSXGB_BENCH_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace ssxgb {

struct BenchRow {
  unsigned key_bits = 0;  // bit length of N
  std::string op;
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
  int reps = 0;
  int inner = 0;  // calls averaged inside one rep
};

// Ops in output order.
const std::vector<std::string>& bench_ops();

// Times every op at each key size. Parameters come from generate_keys(), so
// a cache dir avoids regenerating safe primes.
std::vector<BenchRow> bench_primitives(const std::vector<unsigned>& key_bits,
                                       int reps, uint64_t seed,
                                       const std::string& cache_dir = "");

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace ssxgb

#endif  // SSXGB_BENCH_H_
