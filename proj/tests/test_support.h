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

#ifndef SSXGB_TESTS_TEST_SUPPORT_H_
#define SSXGB_TESTS_TEST_SUPPORT_H_

#include <memory>
#include <string>
#include <vector>

#include "ssxgb/bcp.h"
#include "ssxgb/bus.h"
#include "ssxgb/encoding.h"
#include "ssxgb/federation.h"
#include "ssxgb/protocols.h"
#include "ssxgb/xgb_plain.h"

namespace ssxgb::testing {

struct Params {
  PublicParams pp;
  MasterKey mk;
  std::shared_ptr<const FixedBaseTable> table;
};

// Parameters for an N of n_bits bits, generated once per process (and cached
// on disk through SSXGB_PARAM_CACHE).
const Params& params(unsigned n_bits, uint64_t seed = 11);

// C and S on a private bus with two user keys and their joint key registered.
struct Servers {
  Servers(unsigned n_bits, FixedPointConfig fp = {}, uint64_t seed = 3);

  const Params& prm;
  FixedPointConfig fp;
  MessageBus bus;
  ServerS s;
  ServerC c;
  KeyPair u1, u2;
  BigInt joint;

  // Decrypts with the master key and decodes at the ciphertext's scale.
  double reveal(const ScaledCiphertext& ct);
  BigInt reveal_signed(const ScaledCiphertext& ct);
  BigInt pk_of(const KeyId& id) const;
};

// Dataset from row-major features.
PlainDataset make_dataset(const std::vector<std::vector<double>>& rows,
                          const std::vector<double>& labels);

// Random dataset on an integer grid in [0, levels).
PlainDataset random_dataset(uint64_t seed, std::size_t rows,
                            std::size_t features, int levels);

// The four-row, one-feature example: x = 1..4, y = 0,0,1,1.
PlainDataset four_row_dataset();

}  // namespace ssxgb::testing

#endif  // SSXGB_TESTS_TEST_SUPPORT_H_
