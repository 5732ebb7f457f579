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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sereval/error.hpp"
#include "sereval/labels.hpp"

namespace sereval::ensemble {

inline constexpr int kBenchmarkPrompts = 5;

// Per-sample votes of the prompt variants: n_counts[c] prompts chose class c,
// `failures` could not be mapped to the label set.
struct VoteRecord {
  std::string utt_id;
  std::vector<std::optional<LabelIndex>> per_variant;
  std::vector<int> n_counts;
  int failures = 0;

  int prompts() const noexcept { return static_cast<int>(per_variant.size()); }
};

inline VoteRecord make_vote_record(std::string utt_id, std::vector<std::optional<LabelIndex>> per_variant,
                                   std::size_t classes) {
  VoteRecord r;
  r.utt_id = std::move(utt_id);
  r.n_counts.assign(classes, 0);
  for (const auto& v : per_variant) {
    if (!v) {
      ++r.failures;
    } else {
      if (*v >= classes) throw Error(Errc::kInconsistentVotes, "vote index outside the label set");
      ++r.n_counts[*v];
    }
  }
  r.per_variant = std::move(per_variant);
  return r;
}

// P(c) = (n_c + f / C) / N_prompts. Each failure spreads one vote uniformly.
inline SoftLabel aggregate(const VoteRecord& votes, std::size_t classes, int n_prompts = kBenchmarkPrompts) {
  if (classes == 0 || votes.n_counts.size() != classes)
    throw Error(Errc::kInconsistentVotes, "vote counts do not match the class count");
  int total = votes.failures;
  if (votes.failures < 0) throw Error(Errc::kInconsistentVotes, "negative failure count");
  for (int n : votes.n_counts) {
    if (n < 0) throw Error(Errc::kInconsistentVotes, "negative vote count");
    total += n;
  }
  if (total != n_prompts)
    throw Error(Errc::kInconsistentVotes,
                "votes sum to " + std::to_string(total) + ", expected " + std::to_string(n_prompts));
  const double share = static_cast<double>(votes.failures) / static_cast<double>(classes);
  SoftLabel out;
  out.probs.reserve(classes);
  for (int n : votes.n_counts) out.probs.push_back((static_cast<double>(n) + share) / static_cast<double>(n_prompts));
  return out;
}

// Argmax with ties resolved to the earliest label in label-set order.
inline LabelIndex top1(std::span<const double> probs) {
  LabelIndex best = 0;
  for (LabelIndex c = 1; c < probs.size(); ++c)
    if (probs[c] > probs[best]) best = c;
  return best;
}

inline LabelIndex ensemble_top1(const SoftLabel& dist) { return top1(dist.probs); }

inline nlohmann::json to_json(const VoteRecord& r, const LabelSet& labels) {
  nlohmann::json votes = nlohmann::json::array();
  for (const auto& v : r.per_variant) votes.push_back(v ? nlohmann::json(labels.key(*v)) : nlohmann::json(nullptr));
  return {{"utt_id", r.utt_id}, {"votes", votes}, {"n_counts", r.n_counts}, {"failures", r.failures}};
}

}  // namespace sereval::ensemble
