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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "sereval/error.hpp"
#include "sereval/labels.hpp"
#include "sereval/util.hpp"

namespace sereval::parse {

// Surface form -> canonical label. Chains are followed to a fixed point, so
// apply() is idempotent; cycles are rejected on insertion.
class AliasMap {
 public:
  AliasMap() = default;

  // The shipped table. It only folds inflections and nominalizations onto the
  // adjective/noun forms that common SER label sets use.
  static AliasMap defaults() {
    AliasMap m;
    static constexpr std::pair<const char*, const char*> kTable[] = {
        {"happiness", "happy"},     {"anger", "angry"},         {"angered", "angry"},
        {"sadness", "sad"},         {"fearful", "fear"},        {"afraid", "fear"},
        {"scared", "fear"},         {"surprised", "surprise"},  {"disgusted", "disgust"},
        {"neutrality", "neutral"},  {"calmness", "calm"},       {"contemptuous", "contempt"},
        {"boredom", "bored"},       {"excitement", "excited"},
    };
    for (const auto& [from, to] : kTable) m.set(from, to);
    return m;
  }

  static AliasMap from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(Errc::kConfigError, "alias map must be a JSON object");
    AliasMap m;
    for (const auto& [k, v] : j.items()) {
      if (!v.is_string()) throw Error(Errc::kConfigError, "alias '" + k + "' must map to a string");
      m.set(k, v.get<std::string>());
    }
    return m;
  }

  static AliasMap load(const std::string& path) {
    auto j = nlohmann::json::parse(util::read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(Errc::kConfigError, "alias map " + path + " is not valid JSON");
    return from_json(j);
  }

  void set(std::string_view surface, std::string_view canonical) {
    std::string from = label_key(surface);
    std::string to = label_key(canonical);
    if (from.empty() || to.empty()) throw Error(Errc::kConfigError, "empty alias entry");
    if (from == to) return;
    auto previous = entries_.find(from);
    std::optional<std::string> saved;
    if (previous != entries_.end()) saved = previous->second;
    entries_[from] = to;
    std::string cur = to;
    for (std::size_t steps = 0; steps <= entries_.size(); ++steps) {
      auto it = entries_.find(cur);
      if (it == entries_.end()) return;
      cur = it->second;
      if (cur == from) {
        if (saved) entries_[from] = *saved; else entries_.erase(from);
        throw Error(Errc::kConfigError, "alias cycle through '" + from + "'");
      }
    }
  }

  // Returns the canonical form of an already-normalized key (or the key).
  std::string apply(std::string_view key) const {
    std::string cur(key);
    for (std::size_t steps = 0; steps <= entries_.size(); ++steps) {
      auto it = entries_.find(cur);
      if (it == entries_.end()) break;
      cur = it->second;
    }
    return cur;
  }

  // Entries of `overrides` win.
  AliasMap merged(const AliasMap& overrides) const {
    AliasMap out = *this;
    for (const auto& [k, v] : overrides.entries_) out.set(k, v);
    return out;
  }

  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  nlohmann::json to_json() const { return nlohmann::json(entries_); }
  std::string sha256() const { return util::sha256_hex(to_json().dump()); }

 private:
  std::map<std::string, std::string> entries_;
};

// Maps a surface form onto the closed set: exact key first, then alias
// canonical forms on both sides. Returns nullopt when no unique match exists.
inline std::optional<std::size_t> resolve_label(std::string_view surface, const LabelSet& labels,
                                                const AliasMap& aliases) {
  const std::string key = label_key(surface);
  if (key.empty()) return std::nullopt;
  if (auto hit = labels.find(key)) return hit;
  const std::string canonical = aliases.apply(key);
  if (auto hit = labels.find(canonical)) return hit;
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (aliases.apply(labels.key(i)) != canonical) continue;
    if (found) return std::nullopt;
    found = i;
  }
  return found;
}

}  // namespace sereval::parse
