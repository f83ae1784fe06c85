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

#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lure/chair.h"

namespace lure {

// Object -> set of descriptions mentioning it, built from one corpus snapshot.
class CooccurIndex {
 public:
  static CooccurIndex Build(std::span<const LabeledDescription> corpus);

  bool Contains(const std::string& object) const {
    return sets_.count(object) != 0;
  }
  // |S(o)|; throws PreconditionError for objects outside the index.
  std::size_t SetSize(const std::string& object) const;
  std::size_t IntersectionSize(const std::string& a,
                               const std::string& b) const;
  const std::set<std::string>& Set(const std::string& object) const;
  std::size_t size() const { return sets_.size(); }

 private:
  std::unordered_map<std::string, std::set<std::string>> sets_;
};

// Sum over hallucinated objects i and every other unique object j of
// |S(i) ∩ S(j)| / (|S(i)| + |S(j)|).
double CoScore(const LabeledDescription& desc, const CooccurIndex& index);

// -log p of the mention's first token; nullopt when no logprob was supplied.
std::optional<double> UnScore(const ObjectMention& mention);

// Index(o) / N_s.
double PoScore(const ObjectMention& mention, const TokenizedDescription& desc);

// Equal-width bins over the combined observed range of both groups; the last
// bin is closed on the right.
struct PairedHistogram {
  std::vector<double> edges;  // bins + 1
  std::vector<long> hallucinated;
  std::vector<long> real;

  long total() const;
};

PairedHistogram BuildHistogram(std::span<const double> hallucinated,
                               std::span<const double> real, int bins,
                               const std::string& name);

struct DescriptionScore {
  std::string image_id;
  double co_score = 0.0;
  bool hallucinatory = false;
};

struct MentionScore {
  std::string image_id;
  std::string canonical;
  int token_index = 0;
  bool hallucinated = false;
  std::optional<double> un_score;
  double po_score = 0.0;
};

struct RatioStats {
  std::optional<double> c_ratio;  // nullopt: denominator was 0
  std::optional<double> u_ratio;
  std::optional<double> s_ratio;
};

struct FactorReport {
  std::vector<DescriptionScore> co_scores;
  std::vector<MentionScore> mentions;
  PairedHistogram co_histogram;                   // split per caption
  std::optional<PairedHistogram> un_histogram;    // absent without logprobs
  PairedHistogram po_histogram;                   // split per mention
  RatioStats ratios;
  bool uncertainty_available = false;
};

std::vector<DescriptionScore> ScoreDescriptions(
    std::span<const LabeledDescription> corpus, const CooccurIndex& index,
    int workers = 1);
std::vector<MentionScore> ScoreMentions(
    std::span<const LabeledDescription> corpus);

// C_ratio, U_ratio and S_ratio. "High" co-occurrence and uncertainty mean at
// or above the corpus mean; late position means PoScore >= eta.
RatioStats ComputeRatios(std::span<const DescriptionScore> descriptions,
                         std::span<const MentionScore> mentions, double eta);

FactorReport AnalyzeFactors(std::span<const LabeledDescription> corpus,
                            int bins, double eta, int workers = 1);

}  // namespace lure
