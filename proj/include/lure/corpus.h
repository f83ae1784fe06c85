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
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lure {

// One token of a description. `begin`/`end` are byte offsets into the owning
// description's raw text, so spans can be rewritten without disturbing
// the bytes around them.
struct Token {
  std::string surface;
  int index = 0;                   // 1-based
  std::optional<double> logprob;   // natural log, <= 0
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct TokenizedDescription {
  std::string image_id;
  std::string raw_text;
  std::vector<Token> tokens;

  // N_s: the description length in tokens.
  int length() const { return static_cast<int>(tokens.size()); }
  bool has_logprobs() const;
};

// Splits on ASCII whitespace and detaches leading/trailing ASCII punctuation,
// one token per punctuation byte. Throws PreconditionError on blank text.
std::vector<Token> Tokenize(std::string_view text);

// Builds a description by tokenizing `text`; no logprobs.
TokenizedDescription MakeDescription(std::string image_id, std::string text);

// Builds a description from externally supplied tokens, locating each token
// in `text`. Throws InputError naming the image when the tokens do not spell
// out the text (whitespace between tokens is free).
TokenizedDescription AlignTokens(
    std::string image_id, std::string text,
    const std::vector<std::pair<std::string, std::optional<double>>>& tokens);

// Rebuilds text from tokens: a single space wherever the source had
// whitespace between two tokens, nothing where they were adjacent.
std::string JoinTokens(const TokenizedDescription& desc);

// Collapses runs of whitespace to one space and trims both ends.
std::string NormalizeWhitespace(std::string_view text);

std::string AsciiLower(std::string_view text);

class ObjectVocabulary {
 public:
  // Adds a canonical label with its synonyms. The canonical is itself a
  // lookup surface. Throws InputError on duplicate canonicals or on a
  // surface already owned by another canonical.
  void Add(const std::string& canonical,
           const std::vector<std::string>& synonyms);

  // Case-insensitive lookup of a (possibly multiword) surface.
  std::optional<std::string> Lookup(std::string_view surface) const;

  bool Contains(const std::string& canonical) const {
    return entries_.count(canonical) != 0;
  }
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::set<std::string>>& entries() const {
    return entries_;
  }
  // Longest surface, in tokens.
  int max_phrase_tokens() const { return max_phrase_tokens_; }

 private:
  std::map<std::string, std::set<std::string>> entries_;
  std::unordered_map<std::string, std::string> surface_to_canonical_;
  int max_phrase_tokens_ = 0;
};

struct TokenSpan {
  int first = 0;  // inclusive, 1-based
  int last = 0;   // inclusive
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct ObjectMention {
  std::string canonical;
  std::string surface;
  int token_index = 0;
  TokenSpan span;
  std::optional<double> uncertainty;  // -logprob of the first span token
};

struct ImageAnnotation {
  std::string image_id;
  std::set<std::string> ground_truth;
};

// Greedy left-to-right longest match over the token sequence.
std::vector<ObjectMention> ExtractMentions(const TokenizedDescription& desc,
                                           const ObjectVocabulary& vocab);

// Distinct canonicals of `mentions` in order of first appearance.
std::vector<std::string> UniqueCanonicals(
    const std::vector<ObjectMention>& mentions);

ObjectVocabulary ParseVocabulary(std::string_view contents);
ObjectVocabulary LoadVocabulary(const std::filesystem::path& path);

std::vector<TokenizedDescription> ParseCaptionCorpus(std::string_view contents);
std::vector<TokenizedDescription> LoadCaptionCorpus(
    const std::filesystem::path& path);

std::vector<ImageAnnotation> ParseAnnotations(std::string_view contents,
                                              const ObjectVocabulary& vocab);
std::vector<ImageAnnotation> LoadAnnotations(const std::filesystem::path& path,
                                             const ObjectVocabulary& vocab);

// Reads a whole file; InputError naming the path if it cannot be opened.
std::string ReadFile(const std::filesystem::path& path);

}  // namespace lure
