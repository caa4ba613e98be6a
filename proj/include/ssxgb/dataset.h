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

#ifndef SSXGB_DATASET_H_
#define SSXGB_DATASET_H_

// CSV ingestion and the bundled dataset presets.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ssxgb/xgb_plain.h"

namespace ssxgb {

struct DatasetOptions {
  std::string path;
  std::string label_column = "label";
  // "" (labels already 0/1), "iris" or "mnist".
  std::string preset;
  // Balanced row subsample when positive and smaller than the data.
  int max_rows = 0;
  // Keep the highest-variance columns when positive.
  int max_features = 0;
  uint64_t seed = 0;
};

using LabelMap = std::function<double(const std::string&)>;

// Rectangular CSV with a header row. Every non-label cell must be numeric.
// Throws ConfigError naming the file, row and column on bad input.
PlainDataset read_csv(const std::string& path, const std::string& label_column,
                      const LabelMap& label_map);

// Feature rows of a CSV for prediction, in the given column order. A label
// column, if present, is ignored.
std::vector<std::vector<double>> read_records(
    const std::string& path, const std::vector<std::string>& feature_names);

// Applies the preset (binarization, iris balancing rows, subsampling).
PlainDataset load_dataset(const DatasetOptions& opts);

// Iris: 50 extra setosa rows, each a random setosa row plus N(0, 0.1) noise,
// rounded to one decimal and kept positive.
void add_synthetic_setosa(PlainDataset& data, uint64_t seed);

// Balanced (as far as the classes allow) subsample of `rows` rows, original
// order preserved.
PlainDataset subsample_balanced(const PlainDataset& data, int rows,
                                uint64_t seed);
PlainDataset keep_top_variance(const PlainDataset& data, int features);

}  // namespace ssxgb

#endif  // SSXGB_DATASET_H_
