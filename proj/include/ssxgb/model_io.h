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

#ifndef SSXGB_MODEL_IO_H_
#define SSXGB_MODEL_IO_H_

// JSON forms of trained models and participant lookup tables.

#include <string>

#include "json.hpp"
#include "ssxgb/federation.h"
#include "ssxgb/secure_training.h"
#include "ssxgb/xgb_plain.h"

namespace ssxgb {

inline constexpr int kModelFormatVersion = 1;

// Base-score ciphertext, per-tree node arrays (owner, opaque label, leaf
// ciphertexts), fixed-point config and key size. Instance spaces are not
// written.
nlohmann::json to_json(const TreeList& model);
TreeList tree_list_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LookupTable& table);
LookupTable lookup_table_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PlainModel& model);
PlainModel plain_model_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace ssxgb

#endif  // SSXGB_MODEL_IO_H_
