// Copyright 2026 The lure-toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "lure/errors.h"
#include "lure/masker.h"
#include "planted.h"

namespace lure {
namespace {

ObjectVocabulary Vocab() {
  return ParseVocabulary("dog: puppy\ncat\nfrisbee\ndining table: table\n");
}

std::size_t CountPlaceholders(const std::string& text, const std::string& p) {
  std::size_t n = 0;
  for (auto pos = text.find(p); pos != std::string::npos; pos = text.find(p, pos + 1)) ++n;
  return n;
}

TokenizedDescription DogCat() {
  return AlignTokens("dc", "a dog and a cat",
                     {{"a", -0.01}, {"dog", -1.5}, {"and", -0.1}, {"a", -0.01}, {"cat", -0.2}});
}

TEST(SelectMaskTargets, UncertaintyAndPositionRules) {
  const auto d = DogCat();
  const auto decisions = SelectMaskTargets(d, ExtractMentions(d, Vocab()), MaskPolicy{});
  ASSERT_EQ(decisions.size(), 2u);
  EXPECT_EQ(decisions[0].mention.canonical, "dog");
  EXPECT_EQ(decisions[0].reason, MaskReason::kUncertainty);
  EXPECT_EQ(decisions[1].mention.canonical, "cat");
  EXPECT_EQ(decisions[1].reason, MaskReason::kPosition);
}

TEST(SelectMaskTargets, ThresholdsCompareInclusively) {
  const auto d = AlignTokens("t", "w w w dog cat", {{"w", 0.0}, {"w", 0.0}, {"w", 0.0},
                                                    {"dog", -1.0}, {"cat", 0.0}});
  MaskPolicy p;
  p.gamma = 1.0;
  p.eta = 1.0;  // only index 5 of 5 is late
  const auto decisions = SelectMaskTargets(d, ExtractMentions(d, Vocab()), p);
  ASSERT_EQ(decisions.size(), 2u);
  EXPECT_EQ(decisions[0].reason, MaskReason::kUncertainty);
  EXPECT_EQ(decisions[1].reason, MaskReason::kPosition);
}

TEST(SelectMaskTargets, BothReasons) {
  const auto d = AlignTokens("b", "a cat", {{"a", -0.1}, {"cat", -3.0}});
  const auto decisions = SelectMaskTargets(d, ExtractMentions(d, Vocab()), MaskPolicy{});
  ASSERT_EQ(decisions.size(), 1u);
  EXPECT_EQ(decisions[0].reason, MaskReason::kBoth);
}

TEST(SelectMaskTargets, GammaZeroSelectsEveryLogprobMention) {
  const auto d = AlignTokens("z", "a dog and a cat , then a frisbee and tea",
                             {{"a", 0.0}, {"dog", 0.0}, {"and", 0.0}, {"a", 0.0},
                              {"cat", -0.5}, {",", 0.0}, {"then", 0.0}, {"a", 0.0},
                              {"frisbee", 0.0}, {"and", 0.0}, {"tea", 0.0}});
  MaskPolicy p;
  p.gamma = 0.0;
  p.eta = 5.0;
  EXPECT_EQ(SelectMaskTargets(d, ExtractMentions(d, Vocab()), p).size(), 3u);
}

TEST(SelectMaskTargets, UnreachableThresholdsSelectNothing) {
  const auto d = DogCat();
  MaskPolicy p;
  p.gamma = 1e9;
  p.eta = 2.0;
  EXPECT_TRUE(SelectMaskTargets(d, ExtractMentions(d, Vocab()), p).empty());
}

TEST(SelectMaskTargets, MentionsWithoutLogprobUsePositionOnly) {
  const auto d = MakeDescription("n", "a dog and a cat");
  MaskPolicy p;
  p.gamma = 0.0;
  const auto decisions = SelectMaskTargets(d, ExtractMentions(d, Vocab()), p);
  ASSERT_EQ(decisions.size(), 1u);
  EXPECT_EQ(decisions[0].mention.canonical, "cat");
}

TEST(ApplyMask, ReplacesSelectedSpans) {
  const auto d = DogCat();
  const auto m = ApplyMask(d, SelectMaskTargets(d, ExtractMentions(d, Vocab()), MaskPolicy{}));
  EXPECT_EQ(m.masked_text, "a [IDK] and a [IDK]");
  ASSERT_EQ(m.records.size(), 2u);
  EXPECT_EQ(m.records[0].original, "dog");
  EXPECT_EQ(m.records[0].token_span, (TokenSpan{2, 2}));
  EXPECT_EQ(m.records[1].original, "cat");
  EXPECT_EQ(m.records[1].reason, MaskReason::kPosition);
}

TEST(ApplyMask, NoDecisionsIsIdentity) {
  const auto d = DogCat();
  const auto m = ApplyMask(d, {});
  EXPECT_EQ(m.masked_text, d.raw_text);
  EXPECT_TRUE(m.records.empty());
}

TEST(ApplyMask, MultiwordMentionBecomesOnePlaceholder) {
  const auto d = MakeDescription("t", "a big dining table.");
  const auto mentions = ExtractMentions(d, Vocab());
  const auto m = ApplyMask(d, {{mentions.at(0), MaskReason::kPosition}});
  EXPECT_EQ(m.masked_text, "a big [IDK].");
  EXPECT_EQ(m.records.at(0).original, "dining table");
  EXPECT_EQ(Unmask(m), d.raw_text);
}

TEST(ApplyMask, PreservesSurroundingBytes) {
  const auto d = MakeDescription("w", "  (a  dog),\tand a cat!  ");
  const auto mentions = ExtractMentions(d, Vocab());
  const auto m = ApplyMask(d, {{mentions[0], MaskReason::kUncertainty},
                               {mentions[1], MaskReason::kPosition}});
  EXPECT_EQ(m.masked_text, "  (a  [IDK]),\tand a [IDK]!  ");
}

TEST(ApplyMask, OverlapAndBoundsAreErrors) {
  const auto d = DogCat();
  const auto mentions = ExtractMentions(d, Vocab());
  EXPECT_THROW(ApplyMask(d, {{mentions[0], MaskReason::kPosition},
                             {mentions[0], MaskReason::kPosition}}),
               PreconditionError);
  ObjectMention bad = mentions[0];
  bad.span = {4, 6};
  EXPECT_THROW(ApplyMask(d, {{bad, MaskReason::kPosition}}), PreconditionError);
}

TEST(ApplyMask, RefusesTextThatAlreadyHasThePlaceholder) {
  const auto d = MakeDescription("x", "a [IDK] and a dog");
  EXPECT_THROW(ApplyMask(d, {}), PreconditionError);
}

TEST(ApplyMask, CustomPlaceholder) {
  const auto d = DogCat();
  const auto m = ApplyMask(d, SelectMaskTargets(d, ExtractMentions(d, Vocab()), MaskPolicy{}),
                           "<unk>");
  EXPECT_EQ(m.masked_text, "a <unk> and a <unk>");
  EXPECT_EQ(Unmask(m), d.raw_text);
}

TEST(Unmask, DroppedPlaceholderIsCorruption) {
  const auto d = DogCat();
  auto m = ApplyMask(d, SelectMaskTargets(d, ExtractMentions(d, Vocab()), MaskPolicy{}));
  m.masked_text = "a [IDK] and a cat";
  EXPECT_THROW(Unmask(m), CorruptionError);
}

TEST(Unmask, MovedPlaceholderIsCorruption) {
  const auto d = DogCat();
  auto m = ApplyMask(d, SelectMaskTargets(d, ExtractMentions(d, Vocab()), MaskPolicy{}));
  m.masked_text = "an [IDK] and a [IDK]";
  EXPECT_THROW(Unmask(m), CorruptionError);
}

TEST(Unmask, NoRecordsNoPlaceholderIsIdentity) {
  MaskedDescription m;
  m.masked_text = "a plain caption";
  EXPECT_EQ(Unmask(m), "a plain caption");
}

TEST(MaskDescription, MasksEveryOccurrenceOfASelectedObject) {
  const auto d = AlignTokens("r", "a dog , a puppy and a cat",
                             {{"a", 0.0}, {"dog", -2.0}, {",", 0.0}, {"a", 0.0},
                              {"puppy", -0.1}, {"and", 0.0}, {"a", 0.0}, {"cat", -0.1}});
  MaskPolicy p;
  p.eta = 2.0;
  const auto m = MaskDescription(d, Vocab(), p);
  EXPECT_EQ(m.masked_text, "a [IDK] , a [IDK] and a cat");
  EXPECT_EQ(Unmask(m), d.raw_text);
}

TEST(MaskTrainingCaption, MatchedObjectReplaced) {
  const auto generated = AlignTokens(
      "g", "frisbee , dog on grass today",
      {{"frisbee", -2.0}, {",", 0.0}, {"dog", -0.1}, {"on", 0.0}, {"grass", 0.0}, {"today", 0.0}});
  const auto m = MaskTrainingCaption("a dog with a red frisbee", generated, Vocab(), MaskPolicy{});
  EXPECT_EQ(m.masked_text, "a dog with a red [IDK]");
  ASSERT_EQ(m.records.size(), 1u);
  EXPECT_EQ(Unmask(m), "a dog with a red frisbee");
}

TEST(MaskTrainingCaption, NothingQualifiesLeavesCaption) {
  const auto generated = AlignTokens("g", "dog on grass today now ok",
                                     {{"dog", -0.1}, {"on", 0.0}, {"grass", 0.0},
                                      {"today", 0.0}, {"now", 0.0}, {"ok", 0.0}});
  const auto m = MaskTrainingCaption("a dog with a red frisbee", generated, Vocab(), MaskPolicy{});
  EXPECT_EQ(m.masked_text, "a dog with a red frisbee");
  EXPECT_TRUE(m.records.empty());
}

TEST(MaskTrainingCaption, QualifyingObjectAbsentFromCaption) {
  const auto generated = AlignTokens("g", "cat", {{"cat", -5.0}});
  const auto m = MaskTrainingCaption("a dog with a red frisbee", generated, Vocab(), MaskPolicy{});
  EXPECT_EQ(m.masked_text, "a dog with a red frisbee");
}

TEST(MaskTrainingCaption, EmptyCaptionIsAnError) {
  EXPECT_THROW(MaskTrainingCaption("  ", DogCat(), Vocab(), MaskPolicy{}), PreconditionError);
}

TEST(MaskTrainingCaption, LengthSourceSwitch) {
  // dog sits at index 4 of a 5-token generated text; the caption has 10 tokens.
  const auto generated = MakeDescription("g", "w w w dog w");
  const std::string caption = "a dog runs on the grass in the park today";
  MaskPolicy p;
  p.eta = 0.8;
  p.position_length_source = LengthSource::kCaption;
  EXPECT_TRUE(MaskTrainingCaption(caption, generated, Vocab(), p).records.empty());
  p.position_length_source = LengthSource::kGenerated;
  EXPECT_EQ(MaskTrainingCaption(caption, generated, Vocab(), p).records.size(), 1u);
}

TEST(MaskPolicy, Validation) {
  MaskPolicy p;
  p.gamma = -1;
  EXPECT_THROW(p.Validate(), ConfigError);
  p = {};
  p.eta = 0;
  EXPECT_THROW(p.Validate(), ConfigError);
  p = {};
  p.gamma = std::numeric_limits<double>::infinity();
  EXPECT_THROW(p.Validate(), ConfigError);
  p = {};
  p.placeholder = "[I DK]";
  EXPECT_THROW(p.Validate(), ConfigError);
}

TEST(MaskReason, RoundTripsThroughText) {
  for (auto r : {MaskReason::kUncertainty, MaskReason::kPosition, MaskReason::kBoth}) {
    EXPECT_EQ(ParseMaskReason(ToString(r)), r);
  }
  EXPECT_THROW(ParseMaskReason("whim"), InputError);
}

class MaskLaws : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(2024);
    testing::PlantOptions o;
    o.max_objects = 6;
    o.certain_token_rate = 0.2;
    for (int i = 0; i < 300; ++i) {
      descs_.push_back(testing::PlantCaption(rng, "d" + std::to_string(i), o).desc);
    }
  }
  ObjectVocabulary vocab_ = testing::PlantVocabulary();
  std::vector<TokenizedDescription> descs_;
};

TEST_F(MaskLaws, RoundTripAndCounts) {
  for (const auto& d : descs_) {
    const auto mentions = ExtractMentions(d, vocab_);
    const auto decisions = SelectMaskTargets(d, mentions, MaskPolicy{});
    const auto m = ApplyMask(d, decisions);
    EXPECT_EQ(Unmask(m), d.raw_text);
    EXPECT_EQ(m.records.size(), decisions.size());
    EXPECT_EQ(CountPlaceholders(m.masked_text, "[IDK]"), decisions.size());
  }
}

TEST_F(MaskLaws, SecondPassSelectsNothingNew) {
  for (const auto& d : descs_) {
    const auto mentions = ExtractMentions(d, vocab_);
    const auto m = MaskDescription(d, vocab_, MaskPolicy{});
    std::vector<ObjectMention> left;
    for (const auto& mention : mentions) {
      const bool masked = std::any_of(m.records.begin(), m.records.end(), [&](const auto& r) {
        return r.token_span == mention.span;
      });
      if (!masked) left.push_back(mention);
    }
    EXPECT_TRUE(SelectMaskTargets(d, left, MaskPolicy{}).empty()) << d.raw_text;
    // The placeholder itself never reads as an object.
    const auto again = ExtractMentions(MakeDescription(d.image_id, m.masked_text), vocab_);
    EXPECT_EQ(again.size(), left.size());
  }
}

TEST_F(MaskLaws, LoweringThresholdsNeverUnselects) {
  const std::vector<double> gammas = {4.0, 2.0, 1.0, 0.5, 0.0};
  const std::vector<double> etas = {1.5, 1.0, 0.8, 0.5, 0.1};
  for (const auto& d : descs_) {
    const auto mentions = ExtractMentions(d, vocab_);
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
      for (std::size_t ei = 0; ei < etas.size(); ++ei) {
        MaskPolicy p;
        p.gamma = gammas[gi];
        p.eta = etas[ei];
        const auto base = SelectMaskTargets(d, mentions, p);
        for (auto [dg, de] : {std::pair{1, 0}, std::pair{0, 1}}) {
          if (gi + dg >= gammas.size() || ei + de >= etas.size()) continue;
          MaskPolicy lower = p;
          lower.gamma = gammas[gi + dg];
          lower.eta = etas[ei + de];
          const auto more = SelectMaskTargets(d, mentions, lower);
          for (const auto& b : base) {
            EXPECT_TRUE(std::any_of(more.begin(), more.end(), [&](const auto& x) {
              return x.mention.span == b.mention.span;
            }));
          }
        }
      }
    }
  }
}

}  // namespace
}  // namespace lure
