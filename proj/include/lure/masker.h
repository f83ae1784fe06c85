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
#include <string>
#include <string_view>
#include <vector>

#include "lure/corpus.h"

namespace lure {

// Which description length the training-time position rule divides by.
enum class LengthSource { kCaption, kGenerated };

struct MaskPolicy {
  double gamma = 1.0;  // uncertainty threshold
  double eta = 0.8;    // position threshold, fraction of the length
  std::string placeholder = "[IDK]";
  LengthSource position_length_source = LengthSource::kCaption;

  // Throws ConfigError unless gamma is finite and >= 0, eta is finite and
  // > 0, and the placeholder is a single non-empty whitespace-free token.
  void Validate() const;
};

enum class MaskReason { kUncertainty, kPosition, kBoth };

std::string_view ToString(MaskReason reason);
MaskReason ParseMaskReason(std::string_view text);

struct MaskDecision {
  ObjectMention mention;
  MaskReason reason = MaskReason::kUncertainty;
};

struct MaskRecord {
  std::string original;      // exact bytes replaced
  TokenSpan token_span;
  MaskReason reason = MaskReason::kUncertainty;
  std::size_t offset = 0;    // placeholder's byte offset in masked_text
};

struct MaskedDescription {
  std::string image_id;
  std::string masked_text;
  std::string placeholder = "[IDK]";
  std::vector<MaskRecord> records;  // left to right
};

// Selects mentions with UnScore >= gamma or Index >= eta * N_s. Mentions
// without an uncertainty are only eligible through the position rule.
std::vector<MaskDecision> SelectMaskTargets(
    const TokenizedDescription& desc, const std::vector<ObjectMention>& mentions,
    const MaskPolicy& policy);

// Replaces each decided span with the placeholder; every byte outside the
// spans is kept. Throws PreconditionError on overlapping or out-of-range
// spans, or when the text already contains the placeholder.
MaskedDescription ApplyMask(const TokenizedDescription& desc,
                            const std::vector<MaskDecision>& decisions,
                            std::string_view placeholder = "[IDK]");

// Restores the pre-mask text. Throws CorruptionError when the placeholders
// in the text and the records disagree.
std::string Unmask(const MaskedDescription& masked);

// Training-time masking of a hallucinatory caption: every object of the
// generated description that passes the uncertainty or position rule and
// also occurs in the caption has all of its caption occurrences masked.
MaskedDescription MaskTrainingCaption(const std::string& caption,
                                      const TokenizedDescription& generated,
                                      const ObjectVocabulary& vocab,
                                      const MaskPolicy& policy);

// Inference-time masking of one generated description.
MaskedDescription MaskDescription(const TokenizedDescription& desc,
                                  const ObjectVocabulary& vocab,
                                  const MaskPolicy& policy);

}  // namespace lure
