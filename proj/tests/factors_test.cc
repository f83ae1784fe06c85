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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lure/chair.h"
#include "lure/errors.h"
#include "lure/factors.h"
#include "lure/log.h"
#include "oracles.h"
#include "planted.h"

namespace lure {
namespace {

ObjectVocabulary Vocab() {
  return ParseVocabulary("dog: puppy\nfrisbee\ncar\ncat\nbench\n");
}

LabeledDescription Label(const std::string& id, const std::string& text,
                         std::set<std::string> gt) {
  const auto d = MakeDescription(id, text);
  return LabelMentions(d, ExtractMentions(d, Vocab()), {id, std::move(gt)});
}

LabeledDescription LabelWithLogprobs(
    const std::string& id, const std::string& text,
    const std::vector<std::pair<std::string, std::optional<double>>>& tokens,
    std::set<std::string> gt) {
  const auto d = AlignTokens(id, text, tokens);
  return LabelMentions(d, ExtractMentions(d, Vocab()), {id, std::move(gt)});
}

std::vector<LabeledDescription> Fixture() {
  return {Label("D1", "A dog catches a frisbee.", {"dog"}),
          Label("D2", "A dog sleeps.", {"dog"}),
          Label("D3", "A frisbee lies next to a car.", {"frisbee"})};
}

TEST(CooccurIndex, HandBuiltSets) {
  const auto index = CooccurIndex::Build(Fixture());
  EXPECT_EQ(index.Set("dog"), (std::set<std::string>{"D1", "D2"}));
  EXPECT_EQ(index.Set("frisbee"), (std::set<std::string>{"D1", "D3"}));
  EXPECT_EQ(index.Set("car"), (std::set<std::string>{"D3"}));
  EXPECT_EQ(index.IntersectionSize("dog", "frisbee"), 1u);
  EXPECT_EQ(index.IntersectionSize("car", "dog"), 0u);
}

TEST(CooccurIndex, SingleDescriptionAndRepeats) {
  const std::vector<LabeledDescription> one = {
      Label("a", "a dog, a puppy, a cat and a dog", {"dog"})};
  const auto index = CooccurIndex::Build(one);
  EXPECT_EQ(index.SetSize("dog"), 1u);
  EXPECT_EQ(index.SetSize("cat"), 1u);
}

TEST(CooccurIndex, EmptyCorpusIsAnError) {
  EXPECT_THROW(CooccurIndex::Build(std::vector<LabeledDescription>{}), PreconditionError);
}

TEST(CoScore, FixtureValues) {
  const auto c = Fixture();
  const auto index = CooccurIndex::Build(c);
  EXPECT_NEAR(CoScore(c[0], index), 0.25, 1e-12);
  EXPECT_EQ(CoScore(c[1], index), 0.0);
  EXPECT_NEAR(CoScore(c[2], index), 1.0 / 3.0, 1e-12);
}

TEST(CoScore, ObjectMissingFromIndexIsAnError) {
  const auto index = CooccurIndex::Build(Fixture());
  const auto other = Label("X", "a cat and a bench", {});
  EXPECT_THROW(CoScore(other, index), PreconditionError);
}

TEST(CoScore, MatchesNaiveOracleExactly) {
  std::mt19937_64 rng(77);
  const auto vocab = testing::PlantVocabulary();
  for (int round = 0; round < 20; ++round) {
    const auto corpus = testing::PlantCorpus(rng, {.max_captions = 50});
    const auto labeled = LabelCorpus(corpus.descriptions(), corpus.annotations(), vocab);
    const auto index = CooccurIndex::Build(labeled);
    const auto want = testing::NaiveCoScores(corpus);
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      EXPECT_EQ(CoScore(labeled[i], index), want[i]) << labeled[i].description.raw_text;
    }
  }
}

TEST(CoScore, TermBoundAndZeroWithoutHallucination) {
  std::mt19937_64 rng(8);
  const auto vocab = testing::PlantVocabulary();
  for (int round = 0; round < 20; ++round) {
    const auto corpus = testing::PlantCorpus(rng, {.max_captions = 30});
    const auto labeled = LabelCorpus(corpus.descriptions(), corpus.annotations(), vocab);
    const auto index = CooccurIndex::Build(labeled);
    for (const auto& d : labeled) {
      const double s = CoScore(d, index);
      const int nh = d.n_hallucinated(), nr = d.n_real();
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, nh * (nh + nr - 1) / 2.0 + 1e-12);
      if (nh == 0) {
        EXPECT_EQ(s, 0.0);
      }
    }
  }
}

TEST(UnScore, NegatedLogProbability) {
  auto mention_with = [](double logprob) {
    const auto d = AlignTokens("u", "dog", {{"dog", logprob}});
    return ExtractMentions(d, Vocab()).at(0);
  };
  EXPECT_EQ(*UnScore(mention_with(0.0)), 0.0);
  EXPECT_DOUBLE_EQ(*UnScore(mention_with(std::log(std::exp(-2.0)))), 2.0);
  EXPECT_NEAR(*UnScore(mention_with(std::log(0.5))), 0.6931, 1e-4);
  EXPECT_GT(*UnScore(mention_with(std::log(0.3))), *UnScore(mention_with(std::log(0.6))));
}

TEST(UnScore, MissingLogprobIsUnavailableNotZero) {
  const auto d = MakeDescription("u", "dog");
  EXPECT_FALSE(UnScore(ExtractMentions(d, Vocab()).at(0)).has_value());
}

TEST(PoScore, IndexOverLength) {
  const auto d = MakeDescription("p", "w w w w dog w w w w cat");
  const auto m = ExtractMentions(d, Vocab());
  EXPECT_EQ(PoScore(m[0], d), 0.5);
  EXPECT_EQ(PoScore(m[1], d), 1.0);
  const auto d4 = MakeDescription("q", "dog is so fast");
  EXPECT_EQ(PoScore(ExtractMentions(d4, Vocab()).at(0), d4), 0.25);
}

TEST(PoScore, InUnitIntervalAndIncreasing) {
  std::mt19937_64 rng(21);
  const auto vocab = testing::PlantVocabulary();
  const auto corpus = testing::PlantCorpus(rng, {.min_captions = 100, .max_captions = 100});
  for (const auto& c : corpus.captions) {
    double previous = 0.0;
    for (const auto& m : ExtractMentions(c.desc, vocab)) {
      const double p = PoScore(m, c.desc);
      EXPECT_GT(p, previous);
      EXPECT_LE(p, 1.0);
      previous = p;
    }
  }
}

TEST(Histogram, FixtureCoScoreSplitPerCaption) {
  const auto report = AnalyzeFactors(Fixture(), 3, 0.8);
  const auto& h = report.co_histogram;
  EXPECT_EQ(h.edges.size(), 4u);
  EXPECT_EQ(h.edges.front(), 0.0);
  EXPECT_NEAR(h.edges.back(), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(h.real, (std::vector<long>{1, 0, 0}));
  EXPECT_EQ(h.hallucinated, (std::vector<long>{0, 0, 2}));
}

TEST(Histogram, AllRealLeavesHallucinatedEmpty) {
  const std::vector<LabeledDescription> c = {Label("a", "a dog and a cat", {"dog", "cat"}),
                                             Label("b", "a car", {"car"})};
  const auto report = AnalyzeFactors(c, 4, 0.8);
  for (long n : report.co_histogram.hallucinated) EXPECT_EQ(n, 0);
  for (long n : report.po_histogram.hallucinated) EXPECT_EQ(n, 0);
  EXPECT_EQ(report.po_histogram.total(), 3);
}

TEST(Histogram, SingleBinHoldsEverything) {
  const auto report = AnalyzeFactors(Fixture(), 1, 0.8);
  EXPECT_EQ(report.co_histogram.hallucinated, (std::vector<long>{2}));
  EXPECT_EQ(report.co_histogram.real, (std::vector<long>{1}));
  EXPECT_EQ(report.po_histogram.total(), 5);
}

TEST(Histogram, DegenerateRangeWarns) {
  ScopedLogCapture capture;
  const std::vector<double> h = {0.5, 0.5}, r = {0.5};
  const auto hist = BuildHistogram(h, r, 4, "X");
  EXPECT_TRUE(capture.Contains("degenerate"));
  EXPECT_EQ(hist.total(), 3);
  EXPECT_LT(hist.edges.front(), 0.5);
  EXPECT_GT(hist.edges.back(), 0.5);
}

TEST(Histogram, CountsSumToTotals) {
  std::mt19937_64 rng(12);
  const auto vocab = testing::PlantVocabulary();
  const auto corpus = testing::PlantCorpus(rng, {.min_captions = 30, .max_captions = 60});
  const auto labeled = LabelCorpus(corpus.descriptions(), corpus.annotations(), vocab);
  for (int bins : {1, 2, 7, 20}) {
    const auto r = AnalyzeFactors(labeled, bins, 0.8);
    EXPECT_EQ(r.co_histogram.total(), static_cast<long>(labeled.size()));
    EXPECT_EQ(r.po_histogram.total(), static_cast<long>(r.mentions.size()));
    ASSERT_TRUE(r.un_histogram);
    EXPECT_EQ(r.un_histogram->total(), static_cast<long>(r.mentions.size()));
  }
}

TEST(Ratios, FourMentionUncertaintyFixture) {
  const std::vector<LabeledDescription> c = {LabelWithLogprobs(
      "u", "dog cat car frisbee",
      {{"dog", -0.1}, {"cat", -0.2}, {"car", -1.0}, {"frisbee", -1.7}},
      {"dog", "cat", "car"})};
  const auto r = AnalyzeFactors(c, 2, 0.8);
  ASSERT_TRUE(r.ratios.u_ratio);
  EXPECT_EQ(*r.ratios.u_ratio, 0.5);
}

TEST(Ratios, UndefinedWhenDenominatorIsZero) {
  // No logprobs: U undefined. eta above 1: no mention qualifies for S.
  const auto r = AnalyzeFactors(Fixture(), 2, 1.5);
  EXPECT_FALSE(r.ratios.u_ratio.has_value());
  EXPECT_FALSE(r.ratios.s_ratio.has_value());
  EXPECT_FALSE(r.uncertainty_available);
  EXPECT_FALSE(r.un_histogram.has_value());
  ASSERT_TRUE(r.ratios.c_ratio);
}

TEST(Ratios, NoHallucinationGivesZero) {
  const std::vector<LabeledDescription> c = {LabelWithLogprobs(
      "u", "dog cat", {{"dog", -0.1}, {"cat", -2.0}}, {"dog", "cat"})};
  const auto r = AnalyzeFactors(c, 2, 0.5);
  EXPECT_EQ(r.ratios.c_ratio, 0.0);
  EXPECT_EQ(r.ratios.u_ratio, 0.0);
  EXPECT_EQ(r.ratios.s_ratio, 0.0);
}

TEST(Ratios, AllAboveMeanHallucinatedGivesOne) {
  const std::vector<LabeledDescription> c = {LabelWithLogprobs(
      "u", "dog cat car", {{"dog", -0.1}, {"cat", -3.0}, {"car", -2.5}}, {"dog"})};
  const auto r = AnalyzeFactors(c, 2, 0.8);
  EXPECT_EQ(r.ratios.u_ratio, 1.0);
}

TEST(Ratios, AlwaysInUnitInterval) {
  std::mt19937_64 rng(31);
  const auto vocab = testing::PlantVocabulary();
  for (int round = 0; round < 25; ++round) {
    testing::PlantOptions o;
    o.max_captions = 40;
    o.hallucination_rate = std::uniform_real_distribution<double>(0, 1)(rng);
    const auto corpus = testing::PlantCorpus(rng, o);
    const auto labeled = LabelCorpus(corpus.descriptions(), corpus.annotations(), vocab);
    const auto r = AnalyzeFactors(labeled, 5, 0.8);
    for (const auto& v : {r.ratios.c_ratio, r.ratios.u_ratio, r.ratios.s_ratio}) {
      if (!v) continue;
      EXPECT_GE(*v, 0.0);
      EXPECT_LE(*v, 1.0);
    }
  }
}

TEST(AnalyzeFactors, WorkerCountDoesNotChangeScores) {
  std::mt19937_64 rng(4);
  const auto vocab = testing::PlantVocabulary();
  const auto corpus = testing::PlantCorpus(rng, {.min_captions = 60, .max_captions = 60});
  const auto labeled = LabelCorpus(corpus.descriptions(), corpus.annotations(), vocab);
  const auto a = AnalyzeFactors(labeled, 6, 0.8, 1);
  const auto b = AnalyzeFactors(labeled, 6, 0.8, 4);
  ASSERT_EQ(a.co_scores.size(), b.co_scores.size());
  for (std::size_t i = 0; i < a.co_scores.size(); ++i) {
    EXPECT_EQ(a.co_scores[i].co_score, b.co_scores[i].co_score);
  }
  EXPECT_EQ(a.co_histogram.hallucinated, b.co_histogram.hallucinated);
}

}  // namespace
}  // namespace lure
