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

#include "lure/factors.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lure/errors.h"
#include "lure/log.h"
#include "lure/parallel.h"

namespace lure {
namespace {

// Arithmetic mean clamped into [min, max]; rounding in the sum can otherwise
// push the mean of identical values above all of them.
double ClampedMean(std::span<const double> values) {
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return std::clamp(sum / static_cast<double>(values.size()), *lo, *hi);
}

std::optional<double> Ratio(long numerator, long denominator) {
  if (denominator == 0) return std::nullopt;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace

CooccurIndex CooccurIndex::Build(std::span<const LabeledDescription> corpus) {
  if (corpus.empty()) throw PreconditionError("co-occurrence index of an empty corpus");
  CooccurIndex index;
  for (const auto& d : corpus) {
    for (const auto& m : d.mentions) {
      index.sets_[m.canonical].insert(d.description.image_id);
    }
  }
  return index;
}

const std::set<std::string>& CooccurIndex::Set(const std::string& object) const {
  auto it = sets_.find(object);
  if (it == sets_.end()) {
    throw PreconditionError("object '" + object + "' missing from co-occurrence index");
  }
  return it->second;
}

std::size_t CooccurIndex::SetSize(const std::string& object) const {
  return Set(object).size();
}

std::size_t CooccurIndex::IntersectionSize(const std::string& a,
                                           const std::string& b) const {
  const auto& sa = Set(a);
  const auto& sb = Set(b);
  const auto& small = sa.size() <= sb.size() ? sa : sb;
  const auto& large = sa.size() <= sb.size() ? sb : sa;
  std::size_t n = 0;
  for (const auto& id : small) n += large.count(id);
  return n;
}

double CoScore(const LabeledDescription& desc, const CooccurIndex& index) {
  const std::vector<std::string> objects = UniqueCanonicals(desc.mentions);
  double score = 0.0;
  for (const auto& oi : objects) {
    if (!desc.IsHallucinated(oi)) continue;
    const double si = static_cast<double>(index.SetSize(oi));
    for (const auto& oj : objects) {
      if (oj == oi) continue;
      const double sj = static_cast<double>(index.SetSize(oj));
      score += static_cast<double>(index.IntersectionSize(oi, oj)) / (si + sj);
    }
  }
  return score;
}

std::optional<double> UnScore(const ObjectMention& mention) {
  return mention.uncertainty;
}

double PoScore(const ObjectMention& mention, const TokenizedDescription& desc) {
  return static_cast<double>(mention.token_index) /
         static_cast<double>(desc.length());
}

long PairedHistogram::total() const {
  return std::accumulate(hallucinated.begin(), hallucinated.end(), 0L) +
         std::accumulate(real.begin(), real.end(), 0L);
}

PairedHistogram BuildHistogram(std::span<const double> hallucinated,
                               std::span<const double> real, int bins,
                               const std::string& name) {
  if (bins < 1) throw PreconditionError("histogram needs at least one bin");
  std::vector<double> all(hallucinated.begin(), hallucinated.end());
  all.insert(all.end(), real.begin(), real.end());
  std::sort(all.begin(), all.end());
  const auto distinct = std::unique(all.begin(), all.end()) - all.begin();
  if (distinct < 2) {
    Warn(name + " histogram is degenerate (fewer than 2 distinct values)");
  }

  double lo = all.empty() ? 0.0 : all.front();
  double hi = all.empty() ? 1.0 : all[distinct - 1];
  if (hi <= lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  PairedHistogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + width * b;
  h.edges[bins] = hi;
  h.hallucinated.assign(bins, 0);
  h.real.assign(bins, 0);

  auto bin_of = [&](double v) {
    const int b = static_cast<int>(std::floor((v - lo) / width));
    return std::clamp(b, 0, bins - 1);
  };
  for (double v : hallucinated) ++h.hallucinated[bin_of(v)];
  for (double v : real) ++h.real[bin_of(v)];
  return h;
}

std::vector<DescriptionScore> ScoreDescriptions(
    std::span<const LabeledDescription> corpus, const CooccurIndex& index,
    int workers) {
  return ParallelMap(corpus.size(), workers, [&](std::size_t i) {
    const auto& d = corpus[i];
    return DescriptionScore{d.description.image_id, CoScore(d, index),
                            d.is_hallucinatory()};
  });
}

std::vector<MentionScore> ScoreMentions(
    std::span<const LabeledDescription> corpus) {
  std::vector<MentionScore> out;
  for (const auto& d : corpus) {
    for (const auto& m : d.mentions) {
      out.push_back({d.description.image_id, m.canonical, m.token_index,
                     d.IsHallucinated(m.canonical), UnScore(m),
                     PoScore(m, d.description)});
    }
  }
  return out;
}

RatioStats ComputeRatios(std::span<const DescriptionScore> descriptions,
                         std::span<const MentionScore> mentions, double eta) {
  RatioStats r;
  if (!descriptions.empty()) {
    std::vector<double> co;
    for (const auto& d : descriptions) co.push_back(d.co_score);
    const double mean = ClampedMean(co);
    long num = 0, den = 0;
    for (const auto& d : descriptions) {
      if (d.co_score < mean) continue;
      ++den;
      num += d.hallucinatory;
    }
    r.c_ratio = Ratio(num, den);
  }

  std::vector<double> un;
  for (const auto& m : mentions) {
    if (m.un_score) un.push_back(*m.un_score);
  }
  if (!un.empty()) {
    const double mean = ClampedMean(un);
    long num = 0, den = 0;
    for (const auto& m : mentions) {
      if (!m.un_score || *m.un_score < mean) continue;
      ++den;
      num += m.hallucinated;
    }
    r.u_ratio = Ratio(num, den);
  }

  long num = 0, den = 0;
  for (const auto& m : mentions) {
    if (m.po_score < eta) continue;
    ++den;
    num += m.hallucinated;
  }
  r.s_ratio = Ratio(num, den);
  return r;
}

FactorReport AnalyzeFactors(std::span<const LabeledDescription> corpus,
                            int bins, double eta, int workers) {
  const CooccurIndex index = CooccurIndex::Build(corpus);
  FactorReport report;
  report.co_scores = ScoreDescriptions(corpus, index, workers);
  report.mentions = ScoreMentions(corpus);

  std::vector<double> co_h, co_r, un_h, un_r, po_h, po_r;
  for (const auto& d : report.co_scores) {
    (d.hallucinatory ? co_h : co_r).push_back(d.co_score);
  }
  for (const auto& m : report.mentions) {
    (m.hallucinated ? po_h : po_r).push_back(m.po_score);
    if (m.un_score) (m.hallucinated ? un_h : un_r).push_back(*m.un_score);
  }
  report.co_histogram = BuildHistogram(co_h, co_r, bins, "CoScore");
  report.po_histogram = BuildHistogram(po_h, po_r, bins, "PoScore");
  report.uncertainty_available = !(un_h.empty() && un_r.empty());
  if (report.uncertainty_available) {
    report.un_histogram = BuildHistogram(un_h, un_r, bins, "UnScore");
  }
  report.ratios = ComputeRatios(report.co_scores, report.mentions, eta);
  return report;
}

}  // namespace lure
