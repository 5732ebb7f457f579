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

#include <algorithm>
#include <set>

#include "sereval/aliases.hpp"
#include "sereval/labels.hpp"
#include "sereval/util.hpp"
#include "test_support.hpp"

namespace sereval {
namespace {

TEST(LabelKeyTest, LowercasesAndCollapsesWhitespace) {
  EXPECT_EQ(label_key("  Very   Happy\t"), "very happy");
  EXPECT_EQ(label_key("ANGRY"), "angry");
  EXPECT_EQ(label_key(""), "");
}

TEST(LabelSetTest, KeepsDisplayFormsAndOrder) {
  LabelSet s({"Angry", "Happy", "Neutral"});
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.display(1), "Happy");
  EXPECT_EQ(s.key(1), "happy");
  EXPECT_EQ(s.find("neutral"), 2u);
  EXPECT_FALSE(s.find("Neutral").has_value()) << "find takes normalized keys";
  EXPECT_FALSE(s.find("sad").has_value());
}

TEST(LabelSetTest, RejectsDuplicatesAfterNormalization) {
  EXPECT_THROW(LabelSet({"Happy", " happy "}), std::invalid_argument);
  EXPECT_THROW(LabelSet({"Happy", ""}), std::invalid_argument);
}

TEST(SoftLabelTest, UniformIsValid) {
  for (std::size_t c = 1; c <= 14; ++c) {
    auto u = SoftLabel::uniform(c);
    ASSERT_EQ(u.size(), c);
    EXPECT_TRUE(u.is_valid());
  }
  EXPECT_FALSE((SoftLabel{{0.5, 0.6}}).is_valid());
  EXPECT_FALSE((SoftLabel{{1.2, -0.2}}).is_valid());
}

TEST(AliasMapTest, DefaultsFoldNominalizations) {
  const auto a = parse::AliasMap::defaults();
  EXPECT_EQ(a.apply("happiness"), "happy");
  EXPECT_EQ(a.apply("anger"), "angry");
  EXPECT_EQ(a.apply("afraid"), "fear");
  EXPECT_EQ(a.apply("joy"), "joy") << "unknown words pass through";
}

TEST(AliasMapTest, FollowsChainsAndRejectsCycles) {
  parse::AliasMap a;
  a.set("furious", "anger");
  a.set("anger", "angry");
  EXPECT_EQ(a.apply("furious"), "angry");
  EXPECT_THROW(a.set("angry", "furious"), Error);
  EXPECT_EQ(a.apply("furious"), "angry") << "a rejected entry leaves the map unchanged";
}

TEST(AliasMapTest, OverridesWinWhenMerged) {
  auto base = parse::AliasMap::defaults();
  auto over = parse::AliasMap::from_json(nlohmann::json{{"happiness", "joy"}});
  EXPECT_EQ(base.merged(over).apply("happiness"), "joy");
  EXPECT_NE(base.merged(over).sha256(), base.sha256());
  EXPECT_EQ(base.sha256(), parse::AliasMap::defaults().sha256());
}

TEST(AliasMapTest, FromJsonRejectsNonStrings) {
  EXPECT_THROW(parse::AliasMap::from_json(nlohmann::json{{"x", 1}}), Error);
  EXPECT_THROW(parse::AliasMap::from_json(nlohmann::json::array()), Error);
}

TEST(ResolveLabelTest, ExactThenAliasOnBothSides) {
  const auto a = parse::AliasMap::defaults();
  LabelSet nouns({"Anger", "Happiness", "Sadness", "Neutral"});
  EXPECT_EQ(parse::resolve_label("ANGER", nouns, a), 0u);
  EXPECT_EQ(parse::resolve_label("angry", nouns, a), 0u) << "label side folded through the alias map";
  EXPECT_EQ(parse::resolve_label("happy", nouns, a), 1u);
  EXPECT_FALSE(parse::resolve_label("bored", nouns, a).has_value());
  EXPECT_FALSE(parse::resolve_label("  ", nouns, a).has_value());
}

TEST(ResolveLabelTest, AmbiguousAliasTargetsResolveToNothing) {
  parse::AliasMap a;
  a.set("glad", "happy");
  a.set("joyful", "happy");
  LabelSet s({"Glad", "Joyful", "Sad"});
  EXPECT_FALSE(parse::resolve_label("happy", s, a).has_value());
  EXPECT_EQ(parse::resolve_label("glad", s, a), 0u);
}

TEST(UtilTest, Sha256KnownVectors) {
  EXPECT_EQ(util::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(util::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(UtilTest, Base64KnownVectors) {
  EXPECT_EQ(util::base64_encode(""), "");
  EXPECT_EQ(util::base64_encode("f"), "Zg==");
  EXPECT_EQ(util::base64_encode("foobar"), "Zm9vYmFy");
  EXPECT_EQ(util::base64_encode(std::string("\x00\xff", 2)), "AP8=");
}

TEST(UtilTest, BoundedStaysInRangeAndCoversIt) {
  util::Engine rng(1);
  for (std::uint64_t n : {1ull, 2ull, 3ull, 7ull, 1000ull}) {
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 5000; ++i) {
      auto x = util::bounded(rng, n);
      ASSERT_LT(x, n);
      seen.insert(x);
    }
    if (n <= 7) EXPECT_EQ(seen.size(), n);
  }
}

TEST(UtilTest, SeededShuffleIsAPermutationAndDeterministic) {
  testing::Gen g(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> v(static_cast<std::size_t>(g.integer(0, 40)));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
    auto a = v, b = v;
    util::Engine r1(trial), r2(trial);
    util::seeded_shuffle(a, r1);
    util::seeded_shuffle(b, r2);
    EXPECT_EQ(a, b);
    std::sort(a.begin(), a.end());
    EXPECT_EQ(a, v);
  }
}

TEST(UtilTest, MixSeedSeparatesStreams) {
  EXPECT_NE(util::mix_seed(1, 0), util::mix_seed(1, 1));
  EXPECT_NE(util::mix_seed(1, 0), util::mix_seed(2, 0));
  EXPECT_EQ(util::mix_seed(5, 3), util::mix_seed(5, 3));
}

TEST(UtilTest, TrimAndCollapse) {
  EXPECT_EQ(util::trim("  a b \n"), "a b");
  EXPECT_EQ(util::collapse_space(" a \t\n b  "), "a b");
  EXPECT_EQ(util::replace_all("x{l}y{l}", "{l}", "-"), "x-y-");
}

}  // namespace
}  // namespace sereval
