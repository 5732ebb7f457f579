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

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "sereval/splitter.hpp"
#include "test_support.hpp"

namespace sereval::split {
namespace {

using testing::Gen;
using testing::synthetic_manifest;

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

std::map<std::string, std::string> speaker_of(const corpus::DatasetManifest& m) {
  std::map<std::string, std::string> out;
  for (const auto& u : m.utterances) out[u.utt_id] = *u.speaker_id;
  return out;
}

TEST(SelectPolicyTest, SpeakerCountDrivesThePolicy) {
  EXPECT_EQ(select_policy(synthetic_manifest(3, 4, 2)), Policy::kStratified7525);
  EXPECT_EQ(select_policy(synthetic_manifest(4, 4, 2)), Policy::kLoso);
  EXPECT_EQ(select_policy(synthetic_manifest(5, 4, 2)), Policy::kLoso);
  EXPECT_EQ(select_policy(synthetic_manifest(6, 4, 2)), Policy::kLoso);
  EXPECT_EQ(select_policy(synthetic_manifest(7, 4, 2)), Policy::kSpeaker4Fold);
  EXPECT_EQ(select_policy(synthetic_manifest(10, 4, 2)), Policy::kSpeaker4Fold);
}

TEST(SelectPolicyTest, UnbalancedSpeakersFallBackToStratified) {
  auto m = synthetic_manifest(8, 4, 2);
  // Remove class 3 from three of eight speakers: 37.5% > 25%.
  std::erase_if(m.utterances, [](const corpus::Utterance& u) {
    return u.hard_label == "sad" && (*u.speaker_id == "s00" || *u.speaker_id == "s01" || *u.speaker_id == "s02");
  });
  m.reindex();
  EXPECT_TRUE(speaker_unbalanced(m, 0.25));
  EXPECT_EQ(select_policy(m), Policy::kStratified7525);

  // Two of eight (exactly 25%) is still balanced.
  auto b = synthetic_manifest(8, 4, 2);
  std::erase_if(b.utterances, [](const corpus::Utterance& u) {
    return u.hard_label == "sad" && (*u.speaker_id == "s00" || *u.speaker_id == "s01");
  });
  b.reindex();
  EXPECT_FALSE(speaker_unbalanced(b, 0.25));
  EXPECT_EQ(select_policy(b), Policy::kSpeaker4Fold);
}

TEST(SelectPolicyTest, ProviderSplitsAndMissingSpeakers) {
  auto m = synthetic_manifest(8, 2, 2);
  m.utterances[0].speaker_id.reset();
  EXPECT_EQ(select_policy(m), Policy::kStratified7525);
  m.provider_splits = corpus::ProviderSplits{{m.utterances[1].utt_id}, std::nullopt, {m.utterances[2].utt_id}};
  EXPECT_EQ(select_policy(m), Policy::kProvider);
}

TEST(PlanSplitsTest, ThreeSpeakersGiveOneStratifiedFold) {
  const auto m = synthetic_manifest(3, 4, 3);  // 36 utterances, 9 per class
  const auto plan = plan_splits(m, 1);
  ASSERT_EQ(plan.policy, Policy::kStratified7525);
  ASSERT_EQ(plan.folds.size(), 1u);
  const auto& f = plan.folds[0];
  EXPECT_EQ(f.test_ids.size(), 9u);
  EXPECT_EQ(f.train_ids.size() + f.valid_ids.size(), 27u);
  EXPECT_EQ(f.valid_ids.size(), 5u);  // floor(0.2 * 27)
  EXPECT_TRUE(audit_plan(plan, m).clean());
}

TEST(PlanSplitsTest, FiveSpeakersGiveFiveLosoFolds) {
  const auto m = synthetic_manifest(5, 4, 3);
  const auto plan = plan_splits(m, 1);
  ASSERT_EQ(plan.policy, Policy::kLoso);
  ASSERT_EQ(plan.folds.size(), 5u);
  const auto spk = speaker_of(m);
  for (const auto& f : plan.folds) {
    std::set<std::string> test_speakers;
    for (const auto& id : f.test_ids) test_speakers.insert(spk.at(id));
    EXPECT_EQ(test_speakers.size(), 1u);
  }
  EXPECT_TRUE(audit_plan(plan, m).clean());
}

TEST(PlanSplitsTest, TenSpeakersGiveFourBalancedFolds) {
  const auto m = synthetic_manifest(10, 4, 3);
  const auto plan = plan_splits(m, 1);
  ASSERT_EQ(plan.policy, Policy::kSpeaker4Fold);
  ASSERT_EQ(plan.folds.size(), 4u);
  // 10 equal speakers over 4 folds: loads 3,3,2,2 speakers.
  std::multiset<std::size_t> sizes;
  for (const auto& f : plan.folds) sizes.insert(f.test_ids.size() / 12);
  EXPECT_EQ(sizes, (std::multiset<std::size_t>{2, 2, 3, 3}));
  EXPECT_TRUE(audit_plan(plan, m).clean());
}

TEST(PlanSplitsTest, SingletonClassIsUnsplittable) {
  auto m = synthetic_manifest(2, 3, 2);
  std::erase_if(m.utterances, [](const corpus::Utterance& u) { return u.hard_label == "neutral" && u.utt_id != "s00_c2_000"; });
  m.reindex();
  try {
    plan_splits(m, 0);
    FAIL() << "expected Unsplittable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnsplittable);
  }
}

TEST(PlanSplitsTest, ProviderSplitsAreHonoured) {
  auto m = synthetic_manifest(2, 2, 5);  // 20 utterances
  std::vector<std::string> train, test;
  for (std::size_t i = 0; i < m.utterances.size(); ++i) (i % 4 == 0 ? test : train).push_back(m.utterances[i].utt_id);
  m.provider_splits = corpus::ProviderSplits{train, std::nullopt, test};
  const auto plan = plan_splits(m, 3);
  ASSERT_EQ(plan.policy, Policy::kProvider);
  EXPECT_EQ(as_set(plan.folds[0].test_ids), as_set(test));
  EXPECT_EQ(plan.folds[0].valid_ids.size(), 3u);  // floor(0.2 * 15)
  EXPECT_TRUE(audit_plan(plan, m).clean());
}

// Property: speaker-level policies never leak a speaker across train/valid
// and test, cover each utterance exactly once in test, and are deterministic.
TEST(PlanSplitsProperty, RandomManifestsNeverLeakSpeakers) {
  Gen g(99);
  SplitOptions opt;
  opt.unbalance_threshold = 1.0;  // keep random manifests on speaker policies
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = testing::random_manifest(g, static_cast<std::size_t>(g.integer(4, 14)),
                                            static_cast<std::size_t>(g.integer(2, 6)));
    const auto seed = static_cast<std::uint64_t>(g.integer(0, 1 << 30));
    const auto plan = plan_splits(m, seed, opt);
    ASSERT_TRUE(plan.policy == Policy::kLoso || plan.policy == Policy::kSpeaker4Fold);

    const auto spk = speaker_of(m);
    std::map<std::string, int> test_count;
    for (const auto& f : plan.folds) {
      std::set<std::string> test_speakers;
      for (const auto& id : f.test_ids) {
        test_speakers.insert(spk.at(id));
        ++test_count[id];
      }
      for (const auto* part : {&f.train_ids, &f.valid_ids})
        for (const auto& id : *part) ASSERT_FALSE(test_speakers.count(spk.at(id))) << "trial " << trial;
      ASSERT_EQ(f.train_ids.size() + f.valid_ids.size() + f.test_ids.size(), m.utterances.size());
    }
    for (const auto& u : m.utterances) ASSERT_EQ(test_count[u.utt_id], 1) << u.utt_id;

    const auto audit = audit_plan(plan, m);
    ASSERT_TRUE(audit.clean()) << to_string(audit.findings.front().kind);
    ASSERT_EQ(to_json(plan_splits(m, seed, opt)).dump(), to_json(plan).dump());
  }
}

// Property: the validation holdout is floor(20%) of the fold's training pool
// and each class contributes within one sample of its proportional share.
TEST(PlanSplitsProperty, ValidationHoldoutIsTwentyPercentPerClass) {
  Gen g(5);
  for (int trial = 0; trial < 60; ++trial) {
    const auto m = testing::random_manifest(g, static_cast<std::size_t>(g.integer(2, 12)),
                                            static_cast<std::size_t>(g.integer(2, 5)));
    const auto plan = plan_splits(m, static_cast<std::uint64_t>(trial));
    for (const auto& f : plan.folds) {
      const std::size_t pool = f.train_ids.size() + f.valid_ids.size();
      ASSERT_EQ(f.valid_ids.size(), pool / 5) << "trial " << trial;
      std::vector<std::size_t> pool_c(m.num_classes(), 0), valid_c(m.num_classes(), 0);
      for (const auto* part : {&f.train_ids, &f.valid_ids})
        for (const auto& id : *part) ++pool_c[*m.labels.find(*m.find(id)->hard_label)];
      for (const auto& id : f.valid_ids) ++valid_c[*m.labels.find(*m.find(id)->hard_label)];
      for (std::size_t c = 0; c < m.num_classes(); ++c) {
        const double share = static_cast<double>(pool_c[c]) * static_cast<double>(pool / 5) / static_cast<double>(pool);
        ASSERT_LE(std::abs(static_cast<double>(valid_c[c]) - share), 1.0 + 1e-9)
            << "trial " << trial << " class " << c;
      }
    }
  }
}

TEST(PlanSplitsTest, SeedChangesTheStratifiedSample) {
  const auto m = synthetic_manifest(3, 4, 5);
  EXPECT_EQ(to_json(plan_splits(m, 1)).dump(), to_json(plan_splits(m, 1)).dump());
  EXPECT_NE(to_json(plan_splits(m, 1)).dump(), to_json(plan_splits(m, 2)).dump());
}

TEST(PlanJsonTest, RoundTrips) {
  const auto m = synthetic_manifest(5, 3, 2);
  const auto plan = plan_splits(m, 8);
  const auto back = plan_from_json(to_json(plan));
  EXPECT_EQ(to_json(back).dump(), to_json(plan).dump());
  auto bad = to_json(plan);
  bad["policy"] = "random";
  EXPECT_THROW(plan_from_json(bad), Error);
}

TEST(AuditTest, FlagsLeakageOverlapAndUnknownIds) {
  const auto m = synthetic_manifest(5, 2, 2);
  auto plan = plan_splits(m, 0);
  ASSERT_EQ(plan.policy, Policy::kLoso);
  auto& f = plan.folds[0];
  // Move one test utterance into train as well: overlap + leakage + coverage stays 1.
  f.train_ids.push_back(f.test_ids.front());
  f.valid_ids.push_back("ghost");
  const auto audit = audit_plan(plan, m);
  EXPECT_EQ(audit.count(FindingKind::kOverlap), 1u);
  EXPECT_GE(audit.count(FindingKind::kSpeakerLeakage), 1u);
  EXPECT_EQ(audit.count(FindingKind::kUnknownId), 1u);
  plan.folds[1].test_ids.clear();
  const auto audit2 = audit_plan(plan, m);
  EXPECT_EQ(audit2.count(FindingKind::kEmptyTest), 1u);
  EXPECT_GE(audit2.count(FindingKind::kCoverage), 1u);
}

TEST(AuditTest, ReportsClassBalancePerPartition) {
  const auto m = synthetic_manifest(3, 4, 5);
  const auto audit = audit_plan(plan_splits(m, 4), m);
  ASSERT_EQ(audit.balance.size(), 3u);
  for (const auto& b : audit.balance) EXPECT_LE(b.max_deviation, 1.0) << b.partition;
}

}  // namespace
}  // namespace sereval::split
