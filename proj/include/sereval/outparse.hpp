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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sereval/aliases.hpp"
#include "sereval/error.hpp"
#include "sereval/labels.hpp"
#include "sereval/promptkit.hpp"
#include "sereval/util.hpp"

namespace sereval::parse {

inline constexpr std::string_view kParserVersion = "sereval-parse/1";

struct ParseOptions {
  // Search the whole response for a unique label when no FINAL_LABEL marker
  // is present.
  bool whole_text_fallback = true;
  // Distributions whose mass is within this of 1 are not flagged renormalized.
  double renorm_tolerance = 1e-6;
};

struct FinalLabelResult {
  std::optional<LabelIndex> label;  // nullopt = Invalid
  bool marker_found = false;
  bool from_fallback = false;
};

struct DistributionResult {
  SoftLabel dist;
  bool found = false;
  bool fallback_uniform = false;
  bool renormalized = false;
};

struct ParseStatus {
  bool final_label_found = false;
  bool final_label_from_fallback = false;
  bool distribution_found = false;
  bool distribution_fallback_uniform = false;
  bool renormalized = false;

  friend bool operator==(const ParseStatus&, const ParseStatus&) = default;
};

struct ParsedPrediction {
  std::optional<LabelIndex> final_label;  // nullopt = Invalid, scored as incorrect
  std::optional<SoftLabel> distribution;
  ParseStatus status;

  friend bool operator==(const ParsedPrediction&, const ParsedPrediction&) = default;
};

namespace detail {

inline bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Positions just past each case-insensitive, word-bounded occurrence of
// `marker` that is followed (after quotes/emphasis) by a colon.
inline std::vector<std::size_t> marker_positions(std::string_view lower, std::string_view marker) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while ((pos = lower.find(marker, pos)) != std::string_view::npos) {
    const std::size_t end = pos + marker.size();
    const bool left_ok = pos == 0 || !(is_word_char(lower[pos - 1]) || lower[pos - 1] == '_');
    const bool right_ok = end >= lower.size() || !(is_word_char(lower[end]) || lower[end] == '_');
    if (left_ok && right_ok) {
      std::size_t q = end;
      while (q < lower.size() && (lower[q] == ' ' || lower[q] == '\t' || lower[q] == '*' || lower[q] == '"' ||
                                  lower[q] == '\'' || lower[q] == '`'))
        ++q;
      if (q < lower.size() && lower[q] == ':') out.push_back(q + 1);
    }
    pos = end;
  }
  return out;
}

inline bool is_strip_char(char c) {
  return util::is_space(c) || std::string_view("*\"'`[](){}<>.,;:!?|").find(c) != std::string_view::npos;
}

inline std::string strip_decoration(std::string_view s) {
  while (!s.empty() && is_strip_char(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_strip_char(s.back())) s.remove_suffix(1);
  return std::string(s);
}

// Labels mentioned as whole words/phrases in `text` (already lowercased).
// A mention nested inside a longer mention of another label is ignored.
inline std::vector<LabelIndex> label_mentions(std::string_view text, const LabelSet& labels,
                                              const AliasMap* aliases) {
  struct Span {
    std::size_t begin, end;
    LabelIndex label;
  };
  std::vector<std::pair<std::string, LabelIndex>> forms;
  for (std::size_t i = 0; i < labels.size(); ++i) forms.emplace_back(labels.key(i), i);
  if (aliases) {
    for (const auto& [surface, canonical] : aliases->entries()) {
      if (auto idx = resolve_label(surface, labels, *aliases)) forms.emplace_back(surface, *idx);
    }
  }
  std::vector<Span> spans;
  for (const auto& [form, idx] : forms) {
    std::size_t pos = 0;
    while ((pos = text.find(form, pos)) != std::string_view::npos) {
      const std::size_t end = pos + form.size();
      const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
      const bool right_ok = end >= text.size() || !is_word_char(text[end]);
      if (left_ok && right_ok) spans.push_back({pos, end, idx});
      pos = pos + 1;
    }
  }
  std::vector<LabelIndex> out;
  for (const auto& s : spans) {
    bool nested = false;
    for (const auto& o : spans) {
      if (o.label != s.label && o.begin <= s.begin && s.end <= o.end && (o.end - o.begin) > (s.end - s.begin))
        nested = true;
    }
    if (!nested && std::find(out.begin(), out.end(), s.label) == out.end()) out.push_back(s.label);
  }
  return out;
}

inline std::optional<LabelIndex> unique_mention(std::string_view text, const LabelSet& labels,
                                                const AliasMap* aliases) {
  auto found = label_mentions(text, labels, aliases);
  if (found.size() == 1) return found.front();
  return std::nullopt;
}

inline constexpr int kMaxJsonDepth = 64;

// Balanced-brace object starting at text[start] == '{'. String literals in
// either quote style are skipped. nullopt when unterminated or too deep.
inline std::optional<std::string_view> balanced_object(std::string_view text, std::size_t start) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '{' || c == '[') {
      if (++depth > kMaxJsonDepth) return std::nullopt;
    } else if (c == '}' || c == ']') {
      if (--depth == 0) return text.substr(start, i - start + 1);
      if (depth < 0) return std::nullopt;
    }
  }
  return std::nullopt;
}

// Rewrites single-quoted strings to double-quoted ones and drops trailing
// commas, so near-JSON such as {'happy': 0.7,} parses.
inline std::string lenient_json(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quote) {
      if (c == '\\' && i + 1 < s.size()) {
        if (quote == '\'' && s[i + 1] == '\'') {
          out.push_back('\'');
        } else {
          out.push_back(c);
          out.push_back(s[i + 1]);
        }
        ++i;
        continue;
      }
      if (c == quote) {
        out.push_back('"');
        quote = 0;
        continue;
      }
      if (quote == '\'' && c == '"') {
        out.append("\\\"");
        continue;
      }
      out.push_back(c);
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
      out.push_back('"');
      continue;
    }
    if (c == ',') {
      std::size_t j = i + 1;
      while (j < s.size() && util::is_space(s[j])) ++j;
      if (j < s.size() && (s[j] == '}' || s[j] == ']')) continue;
    }
    out.push_back(c);
  }
  return out;
}

inline std::optional<nlohmann::json> parse_object(std::string_view text) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) j = nlohmann::json::parse(lenient_json(text), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

inline std::optional<double> numeric_value(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s(util::trim(v.get_ref<const std::string&>()));
    if (!s.empty() && s.back() == '%') s.pop_back();
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || !util::trim(std::string_view(end)).empty()) return std::nullopt;
    return x;
  }
  return std::nullopt;
}

struct MappedObject {
  std::vector<double> mass;
  bool any_key = false;
};

inline MappedObject map_object(const nlohmann::json& obj, const LabelSet& labels, const AliasMap& aliases) {
  MappedObject m{std::vector<double>(labels.size(), 0.0), false};
  for (const auto& [key, value] : obj.items()) {
    auto idx = resolve_label(key, labels, aliases);
    if (!idx) continue;
    m.any_key = true;
    auto x = numeric_value(value);
    if (!x || !std::isfinite(*x) || *x < 0.0) continue;  // clamp to 0
    m.mass[*idx] += *x;
  }
  return m;
}

}  // namespace detail

inline FinalLabelResult parse_final_label(std::string_view raw, const LabelSet& labels, const AliasMap& aliases,
                                          const ParseOptions& opt = {}) {
  FinalLabelResult out;
  const std::string lower = util::to_lower(raw);
  const auto markers = detail::marker_positions(lower, "final_label");
  if (markers.empty()) {
    if (opt.whole_text_fallback) {
      out.label = detail::unique_mention(util::collapse_space(lower), labels, nullptr);
      out.from_fallback = out.label.has_value();
    }
    return out;
  }
  out.marker_found = true;

  std::size_t begin = markers.back();
  std::string_view rest = std::string_view(lower).substr(begin);
  std::size_t eol = rest.find('\n');
  std::string value = detail::strip_decoration(rest.substr(0, eol));
  // "FINAL_LABEL:" alone on a line: the answer is on the next non-empty line.
  while (value.empty() && eol != std::string_view::npos) {
    rest = rest.substr(eol + 1);
    eol = rest.find('\n');
    value = detail::strip_decoration(rest.substr(0, eol));
  }
  if (value.empty()) return out;
  if (auto idx = resolve_label(value, labels, aliases)) {
    out.label = idx;
    return out;
  }
  out.label = detail::unique_mention(util::collapse_space(value), labels, &aliases);
  return out;
}

inline DistributionResult parse_distribution(std::string_view raw, const LabelSet& labels, const AliasMap& aliases,
                                             const ParseOptions& opt = {}) {
  DistributionResult out;
  const std::string lower = util::to_lower(raw);
  std::optional<detail::MappedObject> mapped;

  const auto markers = detail::marker_positions(lower, "emotion_distribution");
  for (auto it = markers.rbegin(); it != markers.rend() && !mapped; ++it) {
    const std::size_t brace = raw.find('{', *it);
    if (brace == std::string_view::npos) continue;
    auto text = detail::balanced_object(raw, brace);
    if (!text) continue;
    if (auto obj = detail::parse_object(*text)) mapped = detail::map_object(*obj, labels, aliases);
  }
  if (markers.empty()) {
    for (std::size_t pos = raw.find('{'); pos != std::string_view::npos && !mapped; pos = raw.find('{', pos + 1)) {
      auto text = detail::balanced_object(raw, pos);
      if (!text) continue;
      auto obj = detail::parse_object(*text);
      if (!obj) continue;
      auto m = detail::map_object(*obj, labels, aliases);
      if (m.any_key) mapped = std::move(m);
    }
  }

  if (mapped && mapped->any_key) {
    auto& v = mapped->mass;
    double sum = 0.0;
    for (double x : v) sum += x;
    if (!std::isfinite(sum)) {
      const double top = *std::max_element(v.begin(), v.end());
      for (double& x : v) x /= top;
      sum = 0.0;
      for (double x : v) sum += x;
      out.renormalized = true;
    }
    if (sum > 0.0 && std::isfinite(sum)) {
      out.renormalized = out.renormalized || std::abs(sum - 1.0) > opt.renorm_tolerance;
      for (double& x : v) x /= sum;
      out.dist = SoftLabel{std::move(v)};
      out.found = true;
      return out;
    }
  }
  out.dist = SoftLabel::uniform(labels.size());
  out.fallback_uniform = true;
  out.renormalized = false;
  return out;
}

inline ParsedPrediction parse_response(std::string_view raw, const LabelSet& labels, const AliasMap& aliases,
                                       prompt::Mode mode, const ParseOptions& opt = {}) {
  ParsedPrediction p;
  auto fl = parse_final_label(raw, labels, aliases, opt);
  p.final_label = fl.label;
  p.status.final_label_found = fl.label.has_value();
  p.status.final_label_from_fallback = fl.from_fallback;
  if (mode == prompt::Mode::kDistribution) {
    auto d = parse_distribution(raw, labels, aliases, opt);
    p.distribution = std::move(d.dist);
    p.status.distribution_found = d.found;
    p.status.distribution_fallback_uniform = d.fallback_uniform;
    p.status.renormalized = d.renormalized;
  }
  return p;
}

// Hard mode counts Invalid labels; distribution mode counts uniform fallbacks.
inline double parse_failure_rate(std::span<const ParsedPrediction> preds, prompt::Mode mode) {
  if (preds.empty()) throw Error(Errc::kEmptyInput, "parse_failure_rate over an empty list");
  std::size_t failed = 0;
  for (const auto& p : preds) {
    failed += mode == prompt::Mode::kHard ? !p.final_label.has_value() : p.status.distribution_fallback_uniform;
  }
  return static_cast<double>(failed) / static_cast<double>(preds.size());
}

}  // namespace sereval::parse
