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

#include "lure/masker.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "lure/errors.h"

namespace lure {
namespace {

MaskReason Merge(bool uncertain, bool late) {
  if (uncertain && late) return MaskReason::kBoth;
  return uncertain ? MaskReason::kUncertainty : MaskReason::kPosition;
}

bool HasUncertainty(MaskReason r) { return r != MaskReason::kPosition; }
bool HasPosition(MaskReason r) { return r != MaskReason::kUncertainty; }

std::vector<std::size_t> FindAll(std::string_view text, std::string_view needle) {
  std::vector<std::size_t> out;
  for (std::size_t p = text.find(needle); p != std::string_view::npos;
       p = text.find(needle, p + needle.size())) {
    out.push_back(p);
  }
  return out;
}

}  // namespace

void MaskPolicy::Validate() const {
  if (!std::isfinite(gamma) || gamma < 0.0) {
    throw ConfigError("gamma must be finite and >= 0");
  }
  if (!std::isfinite(eta) || eta <= 0.0) {
    throw ConfigError("eta must be finite and > 0");
  }
  if (placeholder.empty() ||
      placeholder.find_first_of(" \t\n\r\f\v") != std::string::npos) {
    throw ConfigError("placeholder must be a single whitespace-free token");
  }
}

std::string_view ToString(MaskReason reason) {
  switch (reason) {
    case MaskReason::kUncertainty: return "uncertainty";
    case MaskReason::kPosition: return "position";
    case MaskReason::kBoth: return "both";
  }
  return "";
}

MaskReason ParseMaskReason(std::string_view text) {
  if (text == "uncertainty") return MaskReason::kUncertainty;
  if (text == "position") return MaskReason::kPosition;
  if (text == "both") return MaskReason::kBoth;
  throw InputError("unknown mask reason '" + std::string(text) + "'");
}

std::vector<MaskDecision> SelectMaskTargets(
    const TokenizedDescription& desc, const std::vector<ObjectMention>& mentions,
    const MaskPolicy& policy) {
  const double length = static_cast<double>(desc.length());
  std::vector<MaskDecision> out;
  for (const auto& m : mentions) {
    const bool uncertain = m.uncertainty && *m.uncertainty >= policy.gamma;
    const bool late = m.token_index >= policy.eta * length;
    if (uncertain || late) out.push_back({m, Merge(uncertain, late)});
  }
  return out;
}

MaskedDescription ApplyMask(const TokenizedDescription& desc,
                            const std::vector<MaskDecision>& decisions,
                            std::string_view placeholder) {
  if (placeholder.empty()) throw PreconditionError("empty placeholder");
  if (desc.raw_text.find(placeholder) != std::string::npos) {
    throw PreconditionError("text of '" + desc.image_id +
                            "' already contains the placeholder");
  }
  std::vector<const MaskDecision*> sorted;
  for (const auto& d : decisions) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return a->mention.span.first < b->mention.span.first;
  });

  const int n = desc.length();
  int previous_last = 0;
  for (const auto* d : sorted) {
    const TokenSpan& s = d->mention.span;
    if (s.first < 1 || s.last > n || s.first > s.last) {
      throw PreconditionError("mask span out of bounds");
    }
    if (s.first <= previous_last) {
      throw PreconditionError("overlapping mask decisions");
    }
    previous_last = s.last;
  }

  MaskedDescription out;
  out.image_id = desc.image_id;
  out.placeholder = std::string(placeholder);
  std::size_t cursor = 0;
  for (const auto* d : sorted) {
    const TokenSpan& s = d->mention.span;
    const std::size_t begin = desc.tokens[s.first - 1].begin;
    const std::size_t end = desc.tokens[s.last - 1].end;
    out.masked_text.append(desc.raw_text, cursor, begin - cursor);
    out.records.push_back({desc.raw_text.substr(begin, end - begin), s,
                           d->reason, out.masked_text.size()});
    out.masked_text += placeholder;
    cursor = end;
  }
  out.masked_text.append(desc.raw_text, cursor, std::string::npos);
  return out;
}

std::string Unmask(const MaskedDescription& masked) {
  if (masked.placeholder.empty()) throw CorruptionError("empty placeholder");
  const auto found = FindAll(masked.masked_text, masked.placeholder);
  if (found.size() != masked.records.size()) {
    throw CorruptionError("'" + masked.image_id + "': " +
                          std::to_string(found.size()) + " placeholder(s) but " +
                          std::to_string(masked.records.size()) + " record(s)");
  }
  std::string out;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (masked.records[i].offset != found[i]) {
      throw CorruptionError("'" + masked.image_id + "': record " +
                            std::to_string(i) + " does not point at a placeholder");
    }
    out.append(masked.masked_text, cursor, found[i] - cursor);
    out += masked.records[i].original;
    cursor = found[i] + masked.placeholder.size();
  }
  out.append(masked.masked_text, cursor, std::string::npos);
  return out;
}

MaskedDescription MaskTrainingCaption(const std::string& caption,
                                      const TokenizedDescription& generated,
                                      const ObjectVocabulary& vocab,
                                      const MaskPolicy& policy) {
  if (caption.find_first_not_of(" \t\n\r\f\v") == std::string::npos) {
    throw PreconditionError("empty hallucinatory caption");
  }
  const TokenizedDescription h = MakeDescription(generated.image_id, caption);
  const std::vector<ObjectMention> in_caption = ExtractMentions(h, vocab);
  const double length = policy.position_length_source == LengthSource::kCaption
                            ? h.length()
                            : generated.length();

  // canonical -> (uncertain, late)
  std::map<std::string, std::pair<bool, bool>> selected;
  for (const auto& o : ExtractMentions(generated, vocab)) {
    const bool in_h = std::any_of(in_caption.begin(), in_caption.end(),
                                  [&](const auto& m) { return m.canonical == o.canonical; });
    if (!in_h) continue;
    const bool uncertain = o.uncertainty && *o.uncertainty >= policy.gamma;
    const bool late = o.token_index >= policy.eta * length;
    if (!uncertain && !late) continue;
    auto& flags = selected[o.canonical];
    flags.first |= uncertain;
    flags.second |= late;
  }

  std::vector<MaskDecision> decisions;
  for (const auto& m : in_caption) {
    auto it = selected.find(m.canonical);
    if (it == selected.end()) continue;
    decisions.push_back({m, Merge(it->second.first, it->second.second)});
  }
  return ApplyMask(h, decisions, policy.placeholder);
}

MaskedDescription MaskDescription(const TokenizedDescription& desc,
                                  const ObjectVocabulary& vocab,
                                  const MaskPolicy& policy) {
  const std::vector<ObjectMention> mentions = ExtractMentions(desc, vocab);
  const std::vector<MaskDecision> direct = SelectMaskTargets(desc, mentions, policy);

  // String matching masks every occurrence of a selected object.
  std::map<std::string, std::pair<bool, bool>> selected;
  for (const auto& d : direct) {
    auto& flags = selected[d.mention.canonical];
    flags.first |= HasUncertainty(d.reason);
    flags.second |= HasPosition(d.reason);
  }
  std::vector<MaskDecision> decisions;
  std::size_t next_direct = 0;
  for (const auto& m : mentions) {
    if (next_direct < direct.size() &&
        direct[next_direct].mention.span == m.span) {
      decisions.push_back(direct[next_direct++]);
      continue;
    }
    auto it = selected.find(m.canonical);
    if (it != selected.end()) {
      decisions.push_back({m, Merge(it->second.first, it->second.second)});
    }
  }
  return ApplyMask(desc, decisions, policy.placeholder);
}

}  // namespace lure
