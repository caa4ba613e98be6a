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

#include "ssxgb/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ssxgb/errors.h"
#include "ssxgb/random.h"

namespace ssxgb {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
      cell.pop_back();
    }
    std::size_t start = 0;
    while (start < cell.size() && cell[start] == ' ') ++start;
    out.push_back(cell.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

double binary_label(const std::string& s) {
  double v = 0.0;
  if (!parse_double(s, v) || (v != 0.0 && v != 1.0)) {
    throw ConfigError("label '" + s + "' is not 0 or 1 (use a preset)");
  }
  return v;
}

}  // namespace

PlainDataset read_csv(const std::string& path, const std::string& label_column,
                      const LabelMap& label_map) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  const std::vector<std::string> header = split_line(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw ConfigError(path + ": label column '" + label_column + "' missing");
  }
  const std::size_t label_idx = label_it - header.begin();
  PlainDataset data;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_idx) data.feature_names.push_back(header[c]);
  }
  data.columns.resize(data.feature_names.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw ConfigError(path + ":" + std::to_string(row) + ": expected " +
                        std::to_string(header.size()) + " cells, got " +
                        std::to_string(cells.size()));
    }
    std::size_t j = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_idx) continue;
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw ConfigError(path + ":" + std::to_string(row) +
                          ": non-numeric cell '" + cells[c] + "' in column " +
                          header[c]);
      }
      data.columns[j++].push_back(v);
    }
    data.labels.push_back(label_map(cells[label_idx]));
  }
  if (data.rows() < 2) throw ConfigError(path + ": need at least two rows");
  return data;
}

std::vector<std::vector<double>> read_records(
    const std::string& path, const std::vector<std::string>& feature_names) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open records " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  const std::vector<std::string> header = split_line(line);
  std::vector<std::size_t> pick;
  for (const std::string& name : feature_names) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ConfigError(path + ": feature column '" + name + "' missing");
    }
    pick.push_back(it - header.begin());
  }
  std::vector<std::vector<double>> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw ConfigError(path + ":" + std::to_string(row) + ": ragged row");
    }
    std::vector<double> rec;
    for (std::size_t c : pick) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw ConfigError(path + ":" + std::to_string(row) +
                          ": non-numeric cell '" + cells[c] + "'");
      }
      rec.push_back(v);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void add_synthetic_setosa(PlainDataset& data, uint64_t seed) {
  std::vector<std::size_t> setosa;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (data.labels[i] == 1.0) setosa.push_back(i);
  }
  if (setosa.empty()) throw ConfigError("iris preset: no setosa rows");
  RandomSource rng(seed, "iris-synthetic");
  for (int r = 0; r < 50; ++r) {
    const std::size_t src = setosa[rng.index(setosa.size())];
    for (std::size_t j = 0; j < data.cols(); ++j) {
      double v = data.columns[j][src] + rng.normal(0.0, 0.1);
      v = std::max(0.1, std::round(v * 10.0) / 10.0);
      data.columns[j].push_back(v);
    }
    data.labels.push_back(1.0);
  }
}

PlainDataset subsample_balanced(const PlainDataset& data, int rows,
                                uint64_t seed) {
  if (rows <= 0 || static_cast<std::size_t>(rows) >= data.rows()) return data;
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    (data.labels[i] == 1.0 ? pos : neg).push_back(i);
  }
  RandomSource rng(seed, "subsample");
  std::shuffle(pos.begin(), pos.end(), rng.engine());
  std::shuffle(neg.begin(), neg.end(), rng.engine());
  std::size_t want_pos = std::min<std::size_t>(pos.size(), rows / 2);
  std::size_t want_neg = std::min<std::size_t>(neg.size(), rows - want_pos);
  want_pos = std::min<std::size_t>(pos.size(), rows - want_neg);
  std::vector<std::size_t> keep(pos.begin(), pos.begin() + want_pos);
  keep.insert(keep.end(), neg.begin(), neg.begin() + want_neg);
  std::sort(keep.begin(), keep.end());
  PlainDataset out;
  out.feature_names = data.feature_names;
  out.columns.resize(data.cols());
  for (std::size_t i : keep) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      out.columns[j].push_back(data.columns[j][i]);
    }
    out.labels.push_back(data.labels[i]);
  }
  return out;
}

PlainDataset keep_top_variance(const PlainDataset& data, int features) {
  if (features <= 0 || static_cast<std::size_t>(features) >= data.cols()) {
    return data;
  }
  std::vector<double> var(data.cols());
  for (std::size_t j = 0; j < data.cols(); ++j) {
    const auto& col = data.columns[j];
    const double mean =
        std::accumulate(col.begin(), col.end(), 0.0) / col.size();
    double s = 0.0;
    for (double v : col) s += (v - mean) * (v - mean);
    var[j] = s / col.size();
  }
  std::vector<std::size_t> order(data.cols());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return var[a] > var[b]; });
  order.resize(features);
  std::sort(order.begin(), order.end());
  PlainDataset out;
  out.labels = data.labels;
  for (std::size_t j : order) {
    out.columns.push_back(data.columns[j]);
    out.feature_names.push_back(data.feature_names[j]);
  }
  return out;
}

PlainDataset load_dataset(const DatasetOptions& opts) {
  PlainDataset data;
  if (opts.preset == "iris") {
    data = read_csv(opts.path, opts.label_column, [](const std::string& s) {
      return (s == "Iris-setosa" || s == "setosa") ? 1.0 : 0.0;
    });
    add_synthetic_setosa(data, opts.seed);
  } else if (opts.preset == "mnist") {
    data = read_csv(opts.path, opts.label_column, [](const std::string& s) {
      double v = 0.0;
      if (!parse_double(s, v) || v < 0 || v > 9 || v != std::floor(v)) {
        throw ConfigError("mnist preset: label '" + s + "' is not a digit");
      }
      return v <= 4.0 ? 1.0 : 0.0;
    });
  } else if (opts.preset.empty()) {
    data = read_csv(opts.path, opts.label_column, binary_label);
  } else {
    throw ConfigError("unknown preset '" + opts.preset + "'");
  }
  data = subsample_balanced(data, opts.max_rows, opts.seed);
  return keep_top_variance(data, opts.max_features);
}

}  // namespace ssxgb
