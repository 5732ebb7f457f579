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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "sereval/aliases.hpp"
#include "sereval/error.hpp"
#include "sereval/labels.hpp"

namespace sereval::corpus {

inline constexpr int kManifestSchemaVersion = 1;

enum class AudioSource { kInTheWild, kScripted, kSpontaneous, kMixed };
enum class LabelSource { kExpressed, kPerceived, kBoth };

inline std::string_view to_string(AudioSource s) {
  switch (s) {
    case AudioSource::kInTheWild: return "in_the_wild";
    case AudioSource::kScripted: return "scripted";
    case AudioSource::kSpontaneous: return "spontaneous";
    case AudioSource::kMixed: return "mixed";
  }
  return "";
}

inline std::string_view to_string(LabelSource s) {
  switch (s) {
    case LabelSource::kExpressed: return "expressed";
    case LabelSource::kPerceived: return "perceived";
    case LabelSource::kBoth: return "both";
  }
  return "";
}

// Canonical label key -> annotator vote count.
using VoteMap = std::map<std::string, std::int64_t>;

struct Utterance {
  std::string utt_id;
  std::string audio_ref;
  std::optional<std::string> speaker_id;
  std::optional<std::string> hard_label;  // canonical key
  std::optional<VoteMap> votes;           // canonical keys
  std::optional<std::string> transcript;
};

struct ProviderSplits {
  std::vector<std::string> train;
  std::optional<std::vector<std::string>> valid;
  std::vector<std::string> test;
};

struct DatasetManifest {
  std::string dataset_id;
  std::vector<std::string> languages;
  AudioSource audio_source = AudioSource::kScripted;
  std::string audio_source_name;  // only meaningful for in-the-wild corpora
  LabelSource label_source = LabelSource::kExpressed;
  LabelSet labels;
  std::vector<std::string> speakers;  // sorted distinct ids seen in records
  std::vector<Utterance> utterances;
  std::optional<ProviderSplits> provider_splits;
  parse::AliasMap aliases;           // effective map used at load time
  parse::AliasMap dataset_aliases;   // the descriptor's own overrides only
  std::string descriptor_path;

  std::size_t num_classes() const noexcept { return labels.size(); }

  bool has_votes() const {
    for (const auto& u : utterances)
      if (u.votes) return true;
    return false;
  }

  const Utterance* find(std::string_view utt_id) const {
    auto it = index_.find(std::string(utt_id));
    return it == index_.end() ? nullptr : &utterances[it->second];
  }

  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < utterances.size(); ++i) index_.emplace(utterances[i].utt_id, i);
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

enum class TiePolicy {
  kNoAgreement,  // shared maximum -> no consensus; excluded from hard scoring
  kLabelOrder,   // shared maximum -> earliest label in label-set order
};

inline std::string_view to_string(TiePolicy p) {
  return p == TiePolicy::kNoAgreement ? "no_agreement" : "label_order";
}

inline std::vector<std::int64_t> vote_counts(const VoteMap& votes, const LabelSet& labels) {
  std::vector<std::int64_t> counts(labels.size(), 0);
  for (const auto& [key, n] : votes) {
    auto idx = labels.find(key);
    if (!idx) throw Error(Errc::kUnknownLabel, "vote for '" + key + "' is not in the label set");
    if (n < 0) throw Error(Errc::kEmptyVotes, "negative vote count for '" + key + "'");
    counts[*idx] += n;
  }
  return counts;
}

// probs[c] = n_c / N with no smoothing.
inline SoftLabel build_soft_label(const VoteMap& votes, const LabelSet& labels) {
  const auto counts = vote_counts(votes, labels);
  std::int64_t total = 0;
  for (auto n : counts) total += n;
  if (total <= 0) throw Error(Errc::kEmptyVotes, "vote total is zero");
  SoftLabel out;
  out.probs.reserve(counts.size());
  for (auto n : counts) out.probs.push_back(static_cast<double>(n) / static_cast<double>(total));
  return out;
}

// Plurality consensus. nullopt means NoAgreement.
inline std::optional<LabelIndex> derive_hard_label(const VoteMap& votes, const LabelSet& labels,
                                                   TiePolicy policy = TiePolicy::kNoAgreement) {
  const auto counts = vote_counts(votes, labels);
  std::int64_t best = 0;
  std::size_t at = 0, ties = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > best) {
      best = counts[c];
      at = c;
      ties = 1;
    } else if (counts[c] == best && best > 0) {
      ++ties;
    }
  }
  if (best == 0) throw Error(Errc::kEmptyVotes, "vote total is zero");
  if (ties > 1 && policy == TiePolicy::kNoAgreement) return std::nullopt;
  return at;
}

// Hard ground truth used for scoring: the provider label when shipped,
// otherwise the vote consensus.
inline std::optional<LabelIndex> hard_truth(const Utterance& u, const LabelSet& labels,
                                            TiePolicy policy = TiePolicy::kNoAgreement) {
  if (u.hard_label) return labels.find(*u.hard_label);
  if (u.votes) return derive_hard_label(*u.votes, labels, policy);
  return std::nullopt;
}

namespace detail {

class ManifestReader {
 public:
  ManifestReader(std::string file, std::size_t line) : file_(std::move(file)), line_(line) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ManifestError(file_, line_, field, what);
  }

  const nlohmann::json& require(const nlohmann::json& obj, const char* field) const {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) fail(field, "required field missing");
    return *it;
  }

  std::string string_field(const nlohmann::json& obj, const char* field) const {
    const auto& v = require(obj, field);
    if (!v.is_string()) fail(field, "expected a string");
    auto s = v.get<std::string>();
    if (s.empty()) fail(field, "must not be empty");
    return s;
  }

  std::optional<std::string> optional_string(const nlohmann::json& obj, const char* field) const {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail(field, "expected a string");
    return it->get<std::string>();
  }

  std::vector<std::string> string_list(const nlohmann::json& v, const char* field) const {
    if (!v.is_array()) fail(field, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
      if (!e.is_string()) fail(field, "expected an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  void only_fields(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed) const {
    for (const auto& [k, v] : obj.items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || k == a;
      if (!ok) fail(k, "unknown field");
    }
  }

  void set_line(std::size_t line) { line_ = line; }

 private:
  std::string file_;
  std::size_t line_;
};

inline AudioSource parse_audio_source(const ManifestReader& r, const std::string& s) {
  if (s == "in_the_wild") return AudioSource::kInTheWild;
  if (s == "scripted") return AudioSource::kScripted;
  if (s == "spontaneous") return AudioSource::kSpontaneous;
  if (s == "mixed") return AudioSource::kMixed;
  r.fail("audio_source", "unknown audio source '" + s + "'");
}

inline LabelSource parse_label_source(const ManifestReader& r, const std::string& s) {
  if (s == "expressed") return LabelSource::kExpressed;
  if (s == "perceived") return LabelSource::kPerceived;
  if (s == "both") return LabelSource::kBoth;
  r.fail("label_source", "unknown label source '" + s + "'");
}

}  // namespace detail

// Loads a dataset descriptor and its utterance record stream. The record file
// named by the descriptor's "utterances" field is resolved relative to the
// descriptor. Descriptor aliases are merged over `base_aliases`.
inline DatasetManifest load_manifest(const std::string& descriptor_path,
                                     const parse::AliasMap& base_aliases = parse::AliasMap::defaults()) {
  namespace fs = std::filesystem;
  detail::ManifestReader r(descriptor_path, 0);

  std::ifstream in(descriptor_path, std::ios::binary);
  if (!in) r.fail("-", "cannot open descriptor");
  auto desc = nlohmann::json::parse(in, nullptr, false);
  if (desc.is_discarded() || !desc.is_object()) r.fail("-", "descriptor is not a JSON object");
  r.only_fields(desc, {"schema_version", "dataset_id", "languages", "audio_source", "audio_source_name",
                       "label_source", "label_set", "speakers", "utterances", "provider_splits",
                       "aliases"});

  if (auto it = desc.find("schema_version"); it != desc.end()) {
    if (!it->is_number_integer() || it->get<int>() != kManifestSchemaVersion)
      r.fail("schema_version", "unsupported schema version");
  }

  DatasetManifest m;
  m.descriptor_path = descriptor_path;
  m.dataset_id = r.string_field(desc, "dataset_id");
  m.languages = r.string_list(r.require(desc, "languages"), "languages");
  m.audio_source = detail::parse_audio_source(r, r.string_field(desc, "audio_source"));
  m.audio_source_name = r.optional_string(desc, "audio_source_name").value_or("");
  m.label_source = detail::parse_label_source(r, r.string_field(desc, "label_source"));

  auto label_list = r.string_list(r.require(desc, "label_set"), "label_set");
  if (label_list.size() < 2) r.fail("label_set", "needs at least two labels");
  try {
    m.labels = LabelSet(std::move(label_list));
  } catch (const std::invalid_argument& e) {
    r.fail("label_set", e.what());
  }

  m.aliases = base_aliases;
  if (auto it = desc.find("aliases"); it != desc.end()) {
    try {
      m.dataset_aliases = parse::AliasMap::from_json(*it);
      m.aliases = base_aliases.merged(m.dataset_aliases);
    } catch (const Error& e) {
      r.fail("aliases", e.what());
    }
  }

  std::optional<std::set<std::string>> declared_speakers;
  if (auto it = desc.find("speakers"); it != desc.end() && !it->is_null()) {
    auto list = r.string_list(*it, "speakers");
    declared_speakers.emplace(list.begin(), list.end());
  }

  const fs::path records_path =
      fs::path(descriptor_path).parent_path() / r.string_field(desc, "utterances");
  const std::string records_name = records_path.string();
  std::ifstream records(records_path, std::ios::binary);
  if (!records) r.fail("utterances", "cannot open record file " + records_name);

  detail::ManifestReader rr(records_name, 0);
  std::set<std::string> seen_ids;
  std::set<std::string> speakers;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(records, line)) {
    ++lineno;
    rr.set_line(lineno);
    if (util::trim(line).empty()) continue;
    auto rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) rr.fail("-", "record is not a JSON object");
    rr.only_fields(rec, {"utt_id", "audio_ref", "speaker_id", "hard_label", "votes", "transcript"});

    Utterance u;
    u.utt_id = rr.string_field(rec, "utt_id");
    if (!seen_ids.insert(u.utt_id).second) rr.fail("utt_id", "duplicate utt_id '" + u.utt_id + "'");
    u.audio_ref = rr.string_field(rec, "audio_ref");
    u.speaker_id = rr.optional_string(rec, "speaker_id");
    u.transcript = rr.optional_string(rec, "transcript");

    if (auto hl = rr.optional_string(rec, "hard_label")) {
      auto idx = parse::resolve_label(*hl, m.labels, m.aliases);
      if (!idx) rr.fail("hard_label", "label '" + *hl + "' is not in the label set");
      u.hard_label = m.labels.key(*idx);
    }

    if (auto it = rec.find("votes"); it != rec.end() && !it->is_null()) {
      if (!it->is_object()) rr.fail("votes", "expected an object of label -> count");
      VoteMap votes;
      std::int64_t total = 0;
      for (const auto& [k, v] : it->items()) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
          rr.fail("votes", "count for '" + k + "' must be a non-negative integer");
        auto idx = parse::resolve_label(k, m.labels, m.aliases);
        if (!idx) rr.fail("votes", "label '" + k + "' is not in the label set");
        const auto n = v.get<std::int64_t>();
        votes[m.labels.key(*idx)] += n;
        total += n;
      }
      if (total < 1) rr.fail("votes", "vote total must be at least 1");
      u.votes = std::move(votes);
    }

    if (!u.hard_label && !u.votes) rr.fail("hard_label", "record needs hard_label or votes");
    if (u.speaker_id) {
      if (declared_speakers && !declared_speakers->count(*u.speaker_id))
        rr.fail("speaker_id", "speaker '" + *u.speaker_id + "' not declared in descriptor");
      speakers.insert(*u.speaker_id);
    }
    m.utterances.push_back(std::move(u));
  }
  if (m.utterances.empty()) r.fail("utterances", "record file has no utterances");
  m.speakers.assign(speakers.begin(), speakers.end());

  if (auto it = desc.find("provider_splits"); it != desc.end() && !it->is_null()) {
    if (!it->is_object()) r.fail("provider_splits", "expected an object");
    r.only_fields(*it, {"train", "valid", "test"});
    ProviderSplits ps;
    ps.train = r.string_list(r.require(*it, "train"), "provider_splits.train");
    ps.test = r.string_list(r.require(*it, "test"), "provider_splits.test");
    if (auto v = it->find("valid"); v != it->end() && !v->is_null())
      ps.valid = r.string_list(*v, "provider_splits.valid");
    std::set<std::string> assigned;
    auto claim = [&](const std::vector<std::string>& ids, const char* name) {
      for (const auto& id : ids) {
        if (!seen_ids.count(id)) r.fail(name, "unknown utt_id '" + id + "'");
        if (!assigned.insert(id).second) r.fail(name, "utt_id '" + id + "' appears in two partitions");
      }
    };
    claim(ps.train, "provider_splits.train");
    if (ps.valid) claim(*ps.valid, "provider_splits.valid");
    claim(ps.test, "provider_splits.test");
    if (ps.test.empty()) r.fail("provider_splits.test", "test partition is empty");
    m.provider_splits = std::move(ps);
  }

  m.reindex();
  return m;
}

}  // namespace sereval::corpus
