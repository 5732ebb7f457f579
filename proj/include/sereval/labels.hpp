/* Copyright 2026 The sereval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sereval/util.hpp"

namespace sereval {

// Canonical comparison key for a label surface form: ASCII-lowercased with
// internal whitespace collapsed.
inline std::string label_key(std::string_view surface) {
  return util::to_lower(util::collapse_space(surface));
}

// Ordered closed label set. Keeps the original casing for prompt rendering and
// the canonical key for matching; index i is class i everywhere downstream.
class LabelSet {
 public:
  LabelSet() = default;

  explicit LabelSet(std::vector<std::string> labels) : display_(std::move(labels)) {
    if (display_.empty()) throw std::invalid_argument("label set is empty");
    keys_.reserve(display_.size());
    for (std::size_t i = 0; i < display_.size(); ++i) {
      std::string key = label_key(display_[i]);
      if (key.empty()) throw std::invalid_argument("label set contains an empty label");
      if (!index_.emplace(key, i).second) {
        throw std::invalid_argument("label '" + display_[i] + "' duplicates an earlier label");
      }
      keys_.push_back(std::move(key));
    }
  }

  std::size_t size() const noexcept { return display_.size(); }
  bool empty() const noexcept { return display_.empty(); }

  const std::string& display(std::size_t i) const { return display_.at(i); }
  const std::string& key(std::size_t i) const { return keys_.at(i); }
  const std::vector<std::string>& displays() const noexcept { return display_; }
  const std::vector<std::string>& keys() const noexcept { return keys_; }

  // Lookup by canonical key (callers normalize first).
  std::optional<std::size_t> find(std::string_view key) const {
    auto it = index_.find(std::string(key));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const LabelSet& a, const LabelSet& b) { return a.display_ == b.display_; }

 private:
  std::vector<std::string> display_;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::size_t> index_;
};

using LabelIndex = std::size_t;

// Probability vector over a LabelSet, index-aligned with it.
struct SoftLabel {
  std::vector<double> probs;

  std::size_t size() const noexcept { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }

  static SoftLabel uniform(std::size_t classes) {
    return SoftLabel{std::vector<double>(classes, 1.0 / static_cast<double>(classes))};
  }

  // Non-negative, finite entries summing to one within `tolerance`.
  bool is_valid(double tolerance = 1e-9) const {
    if (probs.empty()) return false;
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0) || p > 1.0 + tolerance) return false;
      sum += p;
    }
    return std::abs(sum - 1.0) <= tolerance;
  }

  friend bool operator==(const SoftLabel&, const SoftLabel&) = default;
};

}  // namespace sereval
