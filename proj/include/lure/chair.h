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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "lure/corpus.h"

namespace lure {

enum class ObjectLabel { kReal, kHallucinated };

// A description whose unique mentioned objects have been judged against the
// image's ground truth. Omitted ground-truth objects are not counted.
struct LabeledDescription {
  TokenizedDescription description;
  std::vector<ObjectMention> mentions;
  std::map<std::string, ObjectLabel> labels;  // one entry per unique canonical

  int n_hallucinated() const;
  int n_real() const;
  bool is_hallucinatory() const { return n_hallucinated() > 0; }
  bool IsHallucinated(const std::string& canonical) const;
};

LabeledDescription LabelMentions(const TokenizedDescription& desc,
                                 std::vector<ObjectMention> mentions,
                                 const ImageAnnotation& annotation);

struct ChairReport {
  double chair_i = 0.0;
  double chair_s = 0.0;
  long total_mentioned_objects = 0;
  long total_hallucinated_objects = 0;
  long total_captions = 0;
  long captions_with_hallucination = 0;
};

// Throws PreconditionError on an empty corpus.
ChairReport ChairScores(std::span<const LabeledDescription> corpus);

// Extracts mentions and labels every description. Each caption needs an
// annotation with the same image_id (InputError otherwise).
std::vector<LabeledDescription> LabelCorpus(
    const std::vector<TokenizedDescription>& corpus,
    const std::vector<ImageAnnotation>& annotations,
    const ObjectVocabulary& vocab, int workers = 1);

}  // namespace lure
