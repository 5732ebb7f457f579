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
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sereval/corpusmeta.hpp"
#include "sereval/error.hpp"
#include "sereval/util.hpp"

namespace sereval::split {

enum class Policy { kProvider, kStratified7525, kLoso, kSpeaker4Fold };

inline std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::kProvider: return "provider";
    case Policy::kStratified7525: return "stratified_75_25";
    case Policy::kLoso: return "loso";
    case Policy::kSpeaker4Fold: return "speaker_4fold";
  }
  return "";
}

struct Fold {
  int fold_id = 0;
  std::vector<std::string> train_ids;  // sorted
  std::vector<std::string> valid_ids;  // sorted
  std::vector<std::string> test_ids;   // sorted
};

struct SplitPlan {
  std::string dataset_id;
  Policy policy = Policy::kStratified7525;
  std::uint64_t seed = 0;
  std::vector<Fold> folds;
};

struct SplitOptions {
  // A corpus is speaker-unbalanced when some class is absent for more than
  // this fraction of speakers.
  double unbalance_threshold = 0.25;
  double test_fraction = 0.25;
  double valid_fraction = 0.20;
  int speaker_folds = 4;
  std::size_t min_speakers = 4;
  std::size_t max_loso_speakers = 6;
};

namespace detail {

// Stratum for each utterance: hard label, else vote plurality with label-order
// tie-break (every utterance then has a stratum).
inline std::size_t stratum_of(const corpus::Utterance& u, const LabelSet& labels) {
  auto idx = corpus::hard_truth(u, labels, corpus::TiePolicy::kLabelOrder);
  if (!idx) throw Error(Errc::kMissingGroundTruth, "utterance '" + u.utt_id + "' has no label to stratify on");
  return *idx;
}

// Per-class seeded shuffle, proportional slicing, remainders to the largest
// classes first. Returns (taken, kept), both sorted.
inline std::pair<std::vector<std::string>, std::vector<std::string>> stratified_take(
    const std::vector<std::string>& ids, const corpus::DatasetManifest& m, std::size_t target,
    std::uint64_t seed) {
  const std::size_t classes = m.num_classes();
  std::vector<std::vector<std::string>> by_class(classes);
  for (const auto& id : ids) by_class[stratum_of(*m.find(id), m.labels)].push_back(id);

  std::vector<std::size_t> quota(classes, 0);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    // Exact rational floor of n_c * target / n avoids float drift.
    quota[c] = ids.empty() ? 0 : by_class[c].size() * target / ids.size();
    assigned += quota[c];
  }
  std::vector<std::size_t> order(classes);
  for (std::size_t c = 0; c < classes; ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return by_class[a].size() > by_class[b].size();
  });
  std::size_t remainder = target - assigned;
  for (std::size_t k = 0; remainder > 0 && k < order.size(); ++k) {
    const std::size_t c = order[k];
    if (quota[c] < by_class[c].size()) {
      ++quota[c];
      --remainder;
    }
  }

  util::Engine rng(seed);
  std::vector<std::string> taken, kept;
  for (std::size_t c = 0; c < classes; ++c) {
    auto& bucket = by_class[c];
    std::sort(bucket.begin(), bucket.end());
    util::seeded_shuffle(bucket, rng);
    taken.insert(taken.end(), bucket.begin(), bucket.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    kept.insert(kept.end(), bucket.begin() + static_cast<std::ptrdiff_t>(quota[c]), bucket.end());
  }
  std::sort(taken.begin(), taken.end());
  std::sort(kept.begin(), kept.end());
  return {std::move(taken), std::move(kept)};
}

inline std::size_t floor_fraction(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
}

inline std::size_t round_fraction(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 0.5));
}

inline void hold_out_valid(Fold& fold, const corpus::DatasetManifest& m, const SplitOptions& opt,
                           std::uint64_t seed) {
  const std::size_t target = floor_fraction(fold.train_ids.size(), opt.valid_fraction);
  auto [valid, train] = stratified_take(fold.train_ids, m, target,
                                        util::mix_seed(seed, 1000 + static_cast<std::uint64_t>(fold.fold_id)));
  fold.valid_ids = std::move(valid);
  fold.train_ids = std::move(train);
}

}  // namespace detail

// True when some class present in the corpus is missing for more than
// `threshold` of the speakers.
inline bool speaker_unbalanced(const corpus::DatasetManifest& m, double threshold) {
  if (m.speakers.empty()) return false;
  std::map<std::string, std::set<std::size_t>> classes_by_speaker;
  std::set<std::size_t> corpus_classes;
  for (const auto& u : m.utterances) {
    if (!u.speaker_id) continue;
    const auto c = detail::stratum_of(u, m.labels);
    classes_by_speaker[*u.speaker_id].insert(c);
    corpus_classes.insert(c);
  }
  const double speakers = static_cast<double>(classes_by_speaker.size());
  for (auto c : corpus_classes) {
    std::size_t missing = 0;
    for (const auto& [spk, cls] : classes_by_speaker) missing += cls.count(c) ? 0 : 1;
    if (static_cast<double>(missing) / speakers > threshold) return true;
  }
  return false;
}

inline Policy select_policy(const corpus::DatasetManifest& m, const SplitOptions& opt = {}) {
  if (m.provider_splits) return Policy::kProvider;
  bool all_have_speaker = true;
  for (const auto& u : m.utterances) all_have_speaker = all_have_speaker && u.speaker_id.has_value();
  const std::size_t speakers = m.speakers.size();
  if (!all_have_speaker || speakers < opt.min_speakers || speaker_unbalanced(m, opt.unbalance_threshold))
    return Policy::kStratified7525;
  if (speakers <= opt.max_loso_speakers) return Policy::kLoso;
  return Policy::kSpeaker4Fold;
}

inline SplitPlan plan_splits(const corpus::DatasetManifest& m, std::uint64_t seed,
                             const SplitOptions& opt = {}) {
  SplitPlan plan;
  plan.dataset_id = m.dataset_id;
  plan.seed = seed;
  plan.policy = select_policy(m, opt);

  std::vector<std::string> all_ids;
  all_ids.reserve(m.utterances.size());
  for (const auto& u : m.utterances) all_ids.push_back(u.utt_id);
  std::sort(all_ids.begin(), all_ids.end());

  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };

  switch (plan.policy) {
    case Policy::kProvider: {
      Fold f;
      f.train_ids = sorted(m.provider_splits->train);
      f.test_ids = sorted(m.provider_splits->test);
      if (m.provider_splits->valid)
        f.valid_ids = sorted(*m.provider_splits->valid);
      else
        detail::hold_out_valid(f, m, opt, seed);
      plan.folds.push_back(std::move(f));
      break;
    }
    case Policy::kStratified7525: {
      std::vector<std::size_t> per_class(m.num_classes(), 0);
      for (const auto& u : m.utterances) ++per_class[detail::stratum_of(u, m.labels)];
      for (std::size_t c = 0; c < per_class.size(); ++c) {
        if (per_class[c] == 1)
          throw Error(Errc::kUnsplittable,
                      m.dataset_id + ": class '" + m.labels.display(c) + "' has fewer than 2 samples");
      }
      Fold f;
      auto [test, train] = detail::stratified_take(all_ids, m, detail::round_fraction(all_ids.size(), opt.test_fraction),
                                                   util::mix_seed(seed, 0));
      f.test_ids = std::move(test);
      f.train_ids = std::move(train);
      detail::hold_out_valid(f, m, opt, seed);
      plan.folds.push_back(std::move(f));
      break;
    }
    case Policy::kLoso:
    case Policy::kSpeaker4Fold: {
      std::map<std::string, std::vector<std::string>> by_speaker;
      for (const auto& id : all_ids) by_speaker[*m.find(id)->speaker_id].push_back(id);

      std::vector<std::vector<std::string>> groups;  // speakers per fold
      if (plan.policy == Policy::kLoso) {
        for (const auto& [spk, ids] : by_speaker) groups.push_back({spk});
      } else {
        std::vector<std::string> order;
        for (const auto& [spk, ids] : by_speaker) order.push_back(spk);
        util::Engine rng(util::mix_seed(seed, 1));
        util::seeded_shuffle(order, rng);
        std::stable_sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
          return by_speaker[a].size() > by_speaker[b].size();
        });
        groups.assign(static_cast<std::size_t>(opt.speaker_folds), {});
        std::vector<std::size_t> load(groups.size(), 0);
        for (const auto& spk : order) {
          const auto k = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
          groups[k].push_back(spk);
          load[k] += by_speaker[spk].size();
        }
      }

      for (std::size_t k = 0; k < groups.size(); ++k) {
        std::set<std::string> held(groups[k].begin(), groups[k].end());
        Fold f;
        f.fold_id = static_cast<int>(k);
        for (const auto& id : all_ids) {
          (held.count(*m.find(id)->speaker_id) ? f.test_ids : f.train_ids).push_back(id);
        }
        detail::hold_out_valid(f, m, opt, seed);
        plan.folds.push_back(std::move(f));
      }
      break;
    }
  }
  return plan;
}

inline nlohmann::json to_json(const SplitPlan& plan) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : plan.folds) {
    folds.push_back({{"fold_id", f.fold_id},
                     {"train_ids", f.train_ids},
                     {"valid_ids", f.valid_ids},
                     {"test_ids", f.test_ids}});
  }
  return {{"dataset_id", plan.dataset_id},
          {"policy", std::string(to_string(plan.policy))},
          {"seed", plan.seed},
          {"folds", std::move(folds)}};
}

inline SplitPlan plan_from_json(const nlohmann::json& j) {
  SplitPlan plan;
  plan.dataset_id = j.at("dataset_id").get<std::string>();
  const auto policy = j.at("policy").get<std::string>();
  if (policy == "provider") plan.policy = Policy::kProvider;
  else if (policy == "stratified_75_25") plan.policy = Policy::kStratified7525;
  else if (policy == "loso") plan.policy = Policy::kLoso;
  else if (policy == "speaker_4fold") plan.policy = Policy::kSpeaker4Fold;
  else throw Error(Errc::kConfigError, "unknown split policy '" + policy + "'");
  plan.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& f : j.at("folds")) {
    Fold fold;
    fold.fold_id = f.at("fold_id").get<int>();
    fold.train_ids = f.at("train_ids").get<std::vector<std::string>>();
    fold.valid_ids = f.at("valid_ids").get<std::vector<std::string>>();
    fold.test_ids = f.at("test_ids").get<std::vector<std::string>>();
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Audit

enum class FindingKind { kOverlap, kSpeakerLeakage, kUnknownId, kDuplicateId, kEmptyTest, kCoverage };

inline std::string_view to_string(FindingKind k) {
  switch (k) {
    case FindingKind::kOverlap: return "overlap";
    case FindingKind::kSpeakerLeakage: return "speaker_leakage";
    case FindingKind::kUnknownId: return "unknown_id";
    case FindingKind::kDuplicateId: return "duplicate_id";
    case FindingKind::kEmptyTest: return "empty_test";
    case FindingKind::kCoverage: return "coverage";
  }
  return "";
}

struct Finding {
  FindingKind kind;
  int fold_id;
  std::string subject;  // utterance or speaker id
  std::string detail;
};

struct PartitionBalance {
  int fold_id;
  std::string partition;  // train / valid / test
  std::size_t size = 0;
  std::vector<std::size_t> counts;  // per class
  std::vector<double> expected;     // corpus proportion * size
  double max_deviation = 0.0;       // max |count - expected| in samples
};

struct AuditReport {
  std::vector<Finding> findings;
  std::vector<PartitionBalance> balance;

  std::size_t count(FindingKind k) const {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [k](const Finding& f) { return f.kind == k; }));
  }
  bool clean() const { return findings.empty(); }
};

inline AuditReport audit_plan(const SplitPlan& plan, const corpus::DatasetManifest& m) {
  AuditReport report;
  const std::size_t classes = m.num_classes();
  std::vector<double> corpus_prop(classes, 0.0);
  for (const auto& u : m.utterances) corpus_prop[detail::stratum_of(u, m.labels)] += 1.0;
  for (auto& p : corpus_prop) p /= static_cast<double>(m.utterances.size());

  std::map<std::string, int> test_hits;
  for (const auto& fold : plan.folds) {
    std::map<std::string, std::string> where;
    std::set<std::string> train_speakers, test_speakers;
    auto scan = [&](const std::vector<std::string>& ids, const char* name) {
      PartitionBalance bal{fold.fold_id, name, ids.size(), std::vector<std::size_t>(classes, 0), {}, 0.0};
      for (const auto& id : ids) {
        const auto* u = m.find(id);
        if (!u) {
          report.findings.push_back({FindingKind::kUnknownId, fold.fold_id, id, name});
          continue;
        }
        auto [it, fresh] = where.emplace(id, name);
        if (!fresh) {
          const bool same = it->second == name;
          report.findings.push_back({same ? FindingKind::kDuplicateId : FindingKind::kOverlap, fold.fold_id, id,
                                     it->second + "/" + name});
        }
        ++bal.counts[detail::stratum_of(*u, m.labels)];
        if (u->speaker_id) {
          (std::string_view(name) == "test" ? test_speakers : train_speakers).insert(*u->speaker_id);
        }
      }
      for (std::size_t c = 0; c < classes; ++c) {
        bal.expected.push_back(corpus_prop[c] * static_cast<double>(ids.size()));
        bal.max_deviation =
            std::max(bal.max_deviation, std::abs(static_cast<double>(bal.counts[c]) - bal.expected.back()));
      }
      report.balance.push_back(std::move(bal));
    };
    scan(fold.train_ids, "train");
    scan(fold.valid_ids, "valid");
    scan(fold.test_ids, "test");
    if (fold.test_ids.empty()) report.findings.push_back({FindingKind::kEmptyTest, fold.fold_id, "", "test"});
    for (const auto& id : fold.test_ids) ++test_hits[id];

    if (plan.policy == Policy::kLoso || plan.policy == Policy::kSpeaker4Fold) {
      for (const auto& spk : test_speakers) {
        if (train_speakers.count(spk))
          report.findings.push_back({FindingKind::kSpeakerLeakage, fold.fold_id, spk, "train/valid and test"});
      }
    }
  }

  if (plan.policy == Policy::kLoso || plan.policy == Policy::kSpeaker4Fold) {
    for (const auto& u : m.utterances) {
      const int hits = test_hits.count(u.utt_id) ? test_hits[u.utt_id] : 0;
      if (hits != 1)
        report.findings.push_back(
            {FindingKind::kCoverage, -1, u.utt_id, "in " + std::to_string(hits) + " test sets"});
    }
  }
  return report;
}

}  // namespace sereval::split
