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

#include "lure/chair.h"

#include <unordered_map>

#include "lure/errors.h"
#include "lure/log.h"
#include "lure/parallel.h"

namespace lure {

int LabeledDescription::n_hallucinated() const {
  int n = 0;
  for (const auto& [_, label] : labels) n += label == ObjectLabel::kHallucinated;
  return n;
}

int LabeledDescription::n_real() const {
  return static_cast<int>(labels.size()) - n_hallucinated();
}

bool LabeledDescription::IsHallucinated(const std::string& canonical) const {
  auto it = labels.find(canonical);
  return it != labels.end() && it->second == ObjectLabel::kHallucinated;
}

LabeledDescription LabelMentions(const TokenizedDescription& desc,
                                 std::vector<ObjectMention> mentions,
                                 const ImageAnnotation& annotation) {
  if (annotation.image_id != desc.image_id) {
    throw PreconditionError("annotation '" + annotation.image_id +
                            "' does not belong to description '" +
                            desc.image_id + "'");
  }
  LabeledDescription out;
  out.description = desc;
  for (const auto& m : mentions) {
    out.labels[m.canonical] = annotation.ground_truth.count(m.canonical)
                                  ? ObjectLabel::kReal
                                  : ObjectLabel::kHallucinated;
  }
  out.mentions = std::move(mentions);
  return out;
}

ChairReport ChairScores(std::span<const LabeledDescription> corpus) {
  if (corpus.empty()) throw PreconditionError("CHAIR of an empty corpus");
  ChairReport r;
  for (const auto& d : corpus) {
    const int nh = d.n_hallucinated();
    r.total_mentioned_objects += static_cast<long>(d.labels.size());
    r.total_hallucinated_objects += nh;
    r.captions_with_hallucination += nh > 0;
  }
  r.total_captions = static_cast<long>(corpus.size());
  if (r.total_mentioned_objects == 0) {
    Warn("no objects mentioned in corpus; CHAIR_i defined as 0");
  } else {
    r.chair_i = static_cast<double>(r.total_hallucinated_objects) /
                static_cast<double>(r.total_mentioned_objects);
  }
  r.chair_s = static_cast<double>(r.captions_with_hallucination) /
              static_cast<double>(r.total_captions);
  return r;
}

std::vector<LabeledDescription> LabelCorpus(
    const std::vector<TokenizedDescription>& corpus,
    const std::vector<ImageAnnotation>& annotations,
    const ObjectVocabulary& vocab, int workers) {
  std::unordered_map<std::string, const ImageAnnotation*> by_id;
  for (const auto& a : annotations) by_id[a.image_id] = &a;
  for (const auto& d : corpus) {
    if (!by_id.count(d.image_id)) {
      throw InputError("no annotation for image '" + d.image_id + "'");
    }
  }
  return ParallelMap(corpus.size(), workers, [&](std::size_t i) {
    const auto& d = corpus[i];
    return LabelMentions(d, ExtractMentions(d, vocab), *by_id.at(d.image_id));
  });
}

}  // namespace lure
