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
#include <string>
#include <string_view>
#include <vector>

namespace lure {

enum class PromptKind { kCooccurList, kHallucinateCaption };

// A prompt body with named `{slot}` markers. `{{` and `}}` in the body are
// literal braces. Slot values are inserted verbatim and never re-scanned.
class PromptTemplate {
 public:
  PromptTemplate(PromptKind kind, std::string body);

  PromptKind kind() const { return kind_; }
  const std::vector<std::string>& slots() const { return slots_; }

  // Throws PreconditionError if a slot has no value or a value names an
  // unknown slot.
  std::string Render(const std::map<std::string, std::string>& values) const;

  static const PromptTemplate& CooccurList();
  static const PromptTemplate& HallucinateCaption();

 private:
  PromptKind kind_;
  std::string body_;
  std::vector<std::string> slots_;
};

std::string BuildCooccurPrompt(std::string_view description);

std::string BuildHallucinationPrompt(std::string_view caption,
                                     const std::vector<std::string>& co_objects,
                                     const std::vector<std::string>& uncertain_objects);

// Up to three labels, one per line: numbering and bullets stripped, trimmed,
// lowercased. Lines that read like prose are skipped with a warning. Throws
// ParseError (carrying the raw text) when nothing usable remains.
std::vector<std::string> ParseCooccurResponse(std::string_view text);

// Trims the model's rewrite and drops an echoed "Output caption:" prefix.
// Throws ParseError when the result is empty.
std::string ParseHallucinationResponse(std::string_view text);

}  // namespace lure
