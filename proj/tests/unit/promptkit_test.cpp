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

#include "sereval/promptkit.hpp"
#include "test_support.hpp"

namespace sereval::prompt {
namespace {

const LabelSet kLabels({"Angry", "Happy", "Neutral", "Sad"});

TEST(PromptTest, DirectHardIsExact) {
  const auto p = render_prompt({Variant::kDirect, Mode::kHard, kLabels});
  EXPECT_EQ(p.text,
            "You are a speech emotion recognition system. You are given an audio clip.\n\n"
            "Choose exactly one emotion label from this closed set: Angry, Happy, Neutral, Sad.\n\n"
            "Decide the emotion directly from the audio.\n\n"
            "Response format:\n"
            "FINAL_LABEL: <one label from Angry, Happy, Neutral, Sad>");
  EXPECT_EQ(p.expected_fields, std::vector<Field>{Field::kFinalLabel});
}

TEST(PromptTest, TarDistributionIsExact) {
  const auto p = render_prompt({Variant::kTAR, Mode::kDistribution, LabelSet({"Calm", "Fear"})});
  EXPECT_EQ(p.text,
            "You are a speech emotion recognition system. You are given an audio clip.\n\n"
            "Consider the following emotion labels: Calm, Fear.\n\n"
            "Estimate how likely each emotion is based on the audio. Assign a probability (between 0.0 and 1.0) "
            "to every label. The probabilities must sum to 1.0. Also state which single label is most likely.\n\n"
            "Transcribe the spoken content from the audio as accurately as possible.\n\n"
            "Describe acoustic and paralinguistic cues you hear (e.g., pitch, loudness, speaking rate, pauses, "
            "voice quality, non-speech events).\n\n"
            "Explain how the transcript content and the acoustic cues together support your final choice.\n\n"
            "Response format:\n"
            "ASR_TRANSCRIPT: <transcript>\n"
            "ACOUSTIC_CAPTION: <description>\n"
            "REASONING: <reasoning>\n"
            "EMOTION_DISTRIBUTION: {\"Label1\": prob1, \"Label2\": prob2, ...}\n"
            "FINAL_LABEL: <one label from Calm, Fear>");
}

// Every variant/mode pair: blocks appear exactly when the variant asks for
// them, in fixed order, and the format lists exactly the expected fields.
TEST(PromptTest, BlockPresenceAndOrderForAllPairs) {
  const std::vector<std::pair<std::string, bool (*)(Variant, Mode)>> blocks = {
      {"You are a speech emotion", [](Variant, Mode) { return true; }},
      {"Choose exactly one", [](Variant, Mode m) { return m == Mode::kHard; }},
      {"Consider the following", [](Variant, Mode m) { return m == Mode::kDistribution; }},
      {"Decide the emotion directly", [](Variant v, Mode) { return v == Variant::kDirect; }},
      {"Estimate how likely", [](Variant, Mode m) { return m == Mode::kDistribution; }},
      {"Transcribe the spoken", [](Variant v, Mode) { return has_transcript(v); }},
      {"Describe acoustic", [](Variant v, Mode) { return has_caption(v); }},
      {"Explain how the transcript", [](Variant v, Mode) { return has_reasoning(v); }},
      {"Response format:", [](Variant, Mode) { return true; }},
  };
  for (auto v : list_variants()) {
    for (auto m : {Mode::kHard, Mode::kDistribution}) {
      const auto p = render_prompt({v, m, kLabels});
      std::size_t last = 0;
      for (const auto& [needle, wanted] : blocks) {
        const auto pos = p.text.find(needle);
        ASSERT_EQ(pos != std::string::npos, wanted(v, m)) << to_string(v) << "/" << to_string(m) << ": " << needle;
        if (pos == std::string::npos) continue;
        ASSERT_GE(pos, last) << needle;
        last = pos;
      }
      const auto fmt = p.text.substr(p.text.find("Response format:"));
      for (auto f : {Field::kAsrTranscript, Field::kAcousticCaption, Field::kReasoning, Field::kEmotionDistribution,
                     Field::kFinalLabel}) {
        const bool expected =
            std::find(p.expected_fields.begin(), p.expected_fields.end(), f) != p.expected_fields.end();
        EXPECT_EQ(fmt.find(std::string(marker(f)) + ":") != std::string::npos, expected) << marker(f);
      }
      EXPECT_EQ(p.expected_fields.back(), Field::kFinalLabel);
    }
  }
}

TEST(PromptTest, VariantNamesRoundTrip) {
  for (auto v : list_variants()) EXPECT_EQ(variant_from_string(to_string(v)), v);
  EXPECT_FALSE(variant_from_string("TAX").has_value());
  EXPECT_EQ(mode_from_string("distribution"), Mode::kDistribution);
  EXPECT_FALSE(mode_from_string("soft").has_value());
}

TEST(PromptTest, RenderingIsDeterministic) {
  const auto a = render_prompt({Variant::kTA, Mode::kHard, kLabels});
  const auto b = render_prompt({Variant::kTA, Mode::kHard, LabelSet({"Angry", "Happy", "Neutral", "Sad"})});
  EXPECT_EQ(a, b);
}

TEST(TemplateTest, CustomTemplateOverridesBlocks) {
  auto text = PromptTemplate::builtin().raw();
  text = util::replace_all(text, "Decide the emotion directly from the audio.", "Just listen.");
  const auto tpl = PromptTemplate::parse(text);
  EXPECT_NE(tpl.sha256(), PromptTemplate::builtin().sha256());
  EXPECT_NE(render_prompt({Variant::kDirect, Mode::kHard, kLabels}, tpl).text.find("Just listen."), std::string::npos);
}

TEST(TemplateTest, RejectsIncompleteOrStrayText) {
  EXPECT_THROW(PromptTemplate::parse("[task_description]\nhi\n"), Error);
  EXPECT_THROW(PromptTemplate::parse("stray\n" + PromptTemplate::builtin().raw()), Error);
  EXPECT_THROW(PromptTemplate::parse(PromptTemplate::builtin().raw() + "\n[direct]\nagain\n"), Error);
}

TEST(SftTest, PromptAndTarget) {
  const auto p = render_sft_prompt(kLabels);
  EXPECT_EQ(p.text,
            "You are a speech emotion recognition system. You are given an audio clip.\n\n"
            "Choose exactly one emotion label from this closed set: Angry, Happy, Neutral, Sad.\n\n"
            "Respond with a single line: FINAL_LABEL: <label>");
  EXPECT_EQ(render_sft_target("sad", kLabels), "FINAL_LABEL: Sad");
  EXPECT_EQ(render_sft_target("  HAPPY ", kLabels), "FINAL_LABEL: Happy");
  EXPECT_THROW(render_sft_target("bored", kLabels), Error);
}

}  // namespace
}  // namespace sereval::prompt
