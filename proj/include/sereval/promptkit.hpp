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

#include <array>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sereval/error.hpp"
#include "sereval/labels.hpp"
#include "sereval/prompt_template_asset.hpp"
#include "sereval/util.hpp"

namespace sereval::prompt {

enum class Variant { kDirect, kT, kA, kTA, kTAR };
enum class Mode { kHard, kDistribution };

// Canonical evaluation order. Ensemble vote slots are indexed by it.
inline constexpr std::array<Variant, 5> list_variants() {
  return {Variant::kDirect, Variant::kT, Variant::kA, Variant::kTA, Variant::kTAR};
}

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kDirect: return "Direct";
    case Variant::kT: return "T";
    case Variant::kA: return "A";
    case Variant::kTA: return "TA";
    case Variant::kTAR: return "TAR";
  }
  return "";
}

inline std::string_view to_string(Mode m) { return m == Mode::kHard ? "hard" : "distribution"; }

inline std::optional<Variant> variant_from_string(std::string_view s) {
  for (auto v : list_variants())
    if (to_string(v) == s) return v;
  return std::nullopt;
}

inline std::optional<Mode> mode_from_string(std::string_view s) {
  if (s == "hard") return Mode::kHard;
  if (s == "distribution") return Mode::kDistribution;
  return std::nullopt;
}

inline bool has_transcript(Variant v) { return v == Variant::kT || v == Variant::kTA || v == Variant::kTAR; }
inline bool has_caption(Variant v) { return v == Variant::kA || v == Variant::kTA || v == Variant::kTAR; }
inline bool has_reasoning(Variant v) { return v == Variant::kTAR; }

// Response fields a well-formed answer carries, in response-format order.
enum class Field { kAsrTranscript, kAcousticCaption, kReasoning, kEmotionDistribution, kFinalLabel };

inline std::string_view marker(Field f) {
  switch (f) {
    case Field::kAsrTranscript: return "ASR_TRANSCRIPT";
    case Field::kAcousticCaption: return "ACOUSTIC_CAPTION";
    case Field::kReasoning: return "REASONING";
    case Field::kEmotionDistribution: return "EMOTION_DISTRIBUTION";
    case Field::kFinalLabel: return "FINAL_LABEL";
  }
  return "";
}

struct PromptSpec {
  Variant variant = Variant::kDirect;
  Mode mode = Mode::kHard;
  LabelSet labels;
};

struct PromptText {
  std::string text;
  std::vector<Field> expected_fields;

  friend bool operator==(const PromptText&, const PromptText&) = default;
};

// Named text blocks parsed from the template asset. A line "[name]" opens a
// section; '#' lines are comments; surrounding blank lines are dropped.
class PromptTemplate {
 public:
  static PromptTemplate parse(std::string_view text) {
    PromptTemplate t;
    t.raw_ = std::string(text);
    std::string current;
    std::vector<std::string> lines;
    auto flush = [&] {
      if (current.empty()) return;
      while (!lines.empty() && util::trim(lines.back()).empty()) lines.pop_back();
      std::size_t first = 0;
      while (first < lines.size() && util::trim(lines[first]).empty()) ++first;
      std::vector<std::string> body(lines.begin() + static_cast<std::ptrdiff_t>(first), lines.end());
      t.sections_[current] = util::join(body, "\n");
      lines.clear();
    };
    std::istringstream in(t.raw_);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line.front() == '#') continue;
      auto trimmed = util::trim(line);
      if (trimmed.size() > 2 && trimmed.front() == '[' && trimmed.back() == ']' &&
          trimmed.find(' ') == std::string_view::npos) {
        flush();
        current = std::string(trimmed.substr(1, trimmed.size() - 2));
        if (t.sections_.count(current)) throw Error(Errc::kConfigError, "duplicate template section " + current);
        continue;
      }
      if (current.empty()) {
        if (!trimmed.empty()) throw Error(Errc::kConfigError, "template text outside a section");
        continue;
      }
      lines.push_back(line);
    }
    flush();
    for (const char* name : kRequired) {
      if (!t.sections_.count(name)) throw Error(Errc::kConfigError, std::string("template lacks section ") + name);
    }
    return t;
  }

  static PromptTemplate load(const std::string& path) { return parse(util::read_file(path)); }

  // The template compiled into the library from assets/prompt_template.txt.
  static const PromptTemplate& builtin() {
    static const PromptTemplate t = parse(assets::prompt_template);
    return t;
  }

  const std::string& section(const std::string& name) const {
    auto it = sections_.find(name);
    if (it == sections_.end()) throw Error(Errc::kConfigError, "template lacks section " + name);
    return it->second;
  }

  const std::string& raw() const noexcept { return raw_; }
  std::string sha256() const { return util::sha256_hex(raw_); }

 private:
  static constexpr const char* kRequired[] = {
      "task_description", "categories_hard",   "categories_distribution", "direct",
      "distribution",     "transcript",        "caption",                 "reasoning",
      "format_header",    "format_transcript", "format_caption",          "format_reasoning",
      "format_distribution", "format_final_label", "sft_format"};

  std::string raw_;
  std::map<std::string, std::string> sections_;
};

inline std::string label_list(const LabelSet& labels) { return util::join(labels.displays(), ", "); }

inline std::vector<Field> expected_fields(Variant v, Mode m) {
  std::vector<Field> out;
  if (has_transcript(v)) out.push_back(Field::kAsrTranscript);
  if (has_caption(v)) out.push_back(Field::kAcousticCaption);
  if (has_reasoning(v)) out.push_back(Field::kReasoning);
  if (m == Mode::kDistribution) out.push_back(Field::kEmotionDistribution);
  out.push_back(Field::kFinalLabel);
  return out;
}

// Blocks are joined by blank lines in a fixed order: task description,
// categories, direct, distribution, transcript, caption, reasoning, response
// format.
inline PromptText render_prompt(const PromptSpec& spec, const PromptTemplate& tpl = PromptTemplate::builtin()) {
  if (spec.labels.empty()) throw Error(Errc::kUnknownLabel, "cannot render a prompt for an empty label set");
  const std::string labels = label_list(spec.labels);
  auto fill = [&](const std::string& name) { return util::replace_all(tpl.section(name), "{labels}", labels); };

  std::vector<std::string> blocks;
  blocks.push_back(fill("task_description"));
  blocks.push_back(fill(spec.mode == Mode::kHard ? "categories_hard" : "categories_distribution"));
  if (spec.variant == Variant::kDirect) blocks.push_back(fill("direct"));
  if (spec.mode == Mode::kDistribution) blocks.push_back(fill("distribution"));
  if (has_transcript(spec.variant)) blocks.push_back(fill("transcript"));
  if (has_caption(spec.variant)) blocks.push_back(fill("caption"));
  if (has_reasoning(spec.variant)) blocks.push_back(fill("reasoning"));

  PromptText out;
  out.expected_fields = expected_fields(spec.variant, spec.mode);
  std::vector<std::string> format{fill("format_header")};
  for (auto f : out.expected_fields) {
    switch (f) {
      case Field::kAsrTranscript: format.push_back(fill("format_transcript")); break;
      case Field::kAcousticCaption: format.push_back(fill("format_caption")); break;
      case Field::kReasoning: format.push_back(fill("format_reasoning")); break;
      case Field::kEmotionDistribution: format.push_back(fill("format_distribution")); break;
      case Field::kFinalLabel: format.push_back(fill("format_final_label")); break;
    }
  }
  blocks.push_back(util::join(format, "\n"));
  out.text = util::join(blocks, "\n\n");
  return out;
}

// Closed-set instruction prompt used for supervised fine-tuning corpora.
inline PromptText render_sft_prompt(const LabelSet& labels, const PromptTemplate& tpl = PromptTemplate::builtin()) {
  if (labels.empty()) throw Error(Errc::kUnknownLabel, "cannot render a prompt for an empty label set");
  const std::string list = label_list(labels);
  auto fill = [&](const std::string& name) { return util::replace_all(tpl.section(name), "{labels}", list); };
  PromptText out;
  out.text = util::join({fill("task_description"), fill("categories_hard"), fill("sft_format")}, "\n\n");
  out.expected_fields = {Field::kFinalLabel};
  return out;
}

inline std::string render_sft_target(std::string_view label, const LabelSet& labels) {
  auto idx = labels.find(label_key(label));
  if (!idx) throw Error(Errc::kUnknownLabel, "label '" + std::string(label) + "' is not in the label set");
  return "FINAL_LABEL: " + labels.display(*idx);
}

}  // namespace sereval::prompt
