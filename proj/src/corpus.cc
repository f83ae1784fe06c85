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

#include "lure/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "lure/errors.h"
#include "lure/log.h"

namespace lure {
namespace {

using nlohmann::json;

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsPunct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

void PushToken(std::vector<Token>& out, std::string_view text,
               std::size_t begin, std::size_t end) {
  Token t;
  t.surface = std::string(text.substr(begin, end - begin));
  t.index = static_cast<int>(out.size()) + 1;
  t.begin = begin;
  t.end = end;
  out.push_back(std::move(t));
}

// Lookup key for a surface: lowercased tokens joined by single spaces.
std::string SurfaceKey(std::string_view surface) {
  std::string key;
  for (const Token& t : Tokenize(surface)) {
    if (!key.empty()) key += ' ';
    key += AsciiLower(t.surface);
  }
  return key;
}

std::string LinePrefix(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

template <typename Fn>
void ForEachRecordLine(std::string_view contents, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) nl = contents.size();
    ++line_no;
    std::string_view line = Trim(contents.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(LinePrefix(line_no) + "malformed record: " + e.what());
    }
    if (!record.is_object()) {
      throw InputError(LinePrefix(line_no) + "record is not an object");
    }
    fn(line_no, record);
  }
}

std::string RequireString(const json& record, const char* key,
                          std::size_t line_no) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw InputError(LinePrefix(line_no) + "missing string field '" + key +
                     "'");
  }
  return it->get<std::string>();
}

}  // namespace

bool TokenizedDescription::has_logprobs() const {
  return std::any_of(tokens.begin(), tokens.end(),
                     [](const Token& t) { return t.logprob.has_value(); });
}

std::string AsciiLower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    if (i == text.size()) break;
    std::size_t end = i;
    while (end < text.size() && !IsSpace(text[end])) ++end;

    std::size_t core_begin = i;
    while (core_begin < end && IsPunct(text[core_begin])) {
      PushToken(out, text, core_begin, core_begin + 1);
      ++core_begin;
    }
    std::size_t core_end = end;
    while (core_end > core_begin && IsPunct(text[core_end - 1])) --core_end;
    if (core_end > core_begin) PushToken(out, text, core_begin, core_end);
    for (std::size_t p = core_end; p < end; ++p) PushToken(out, text, p, p + 1);
    i = end;
  }
  if (out.empty()) throw PreconditionError("empty description: no tokens");
  return out;
}

TokenizedDescription MakeDescription(std::string image_id, std::string text) {
  TokenizedDescription desc;
  desc.tokens = Tokenize(text);
  desc.image_id = std::move(image_id);
  desc.raw_text = std::move(text);
  return desc;
}

TokenizedDescription AlignTokens(
    std::string image_id, std::string text,
    const std::vector<std::pair<std::string, std::optional<double>>>& tokens) {
  auto fail = [&](const std::string& why) {
    return InputError("token alignment failed for image '" + image_id +
                      "': " + why);
  };
  if (tokens.empty()) throw fail("token list is empty");

  TokenizedDescription desc;
  std::size_t pos = 0;
  for (const auto& [raw_surface, logprob] : tokens) {
    std::string_view surface = Trim(raw_surface);
    if (surface.empty()) throw fail("whitespace-only token");
    while (pos < text.size() && IsSpace(text[pos])) ++pos;
    if (text.compare(pos, surface.size(), surface) != 0) {
      throw fail("token '" + std::string(surface) + "' does not match text at byte " +
                 std::to_string(pos));
    }
    if (logprob && (!std::isfinite(*logprob) || *logprob > 0.0)) {
      throw fail("logprob must be finite and <= 0");
    }
    Token t;
    t.surface = std::string(surface);
    t.index = static_cast<int>(desc.tokens.size()) + 1;
    t.logprob = logprob;
    t.begin = pos;
    t.end = pos + surface.size();
    desc.tokens.push_back(std::move(t));
    pos += surface.size();
  }
  if (!Trim(std::string_view(text).substr(pos)).empty()) {
    throw fail("text continues past the last token");
  }
  desc.image_id = std::move(image_id);
  desc.raw_text = std::move(text);
  return desc;
}

std::string JoinTokens(const TokenizedDescription& desc) {
  std::string out;
  for (std::size_t i = 0; i < desc.tokens.size(); ++i) {
    if (i > 0 && desc.tokens[i].begin > desc.tokens[i - 1].end) out += ' ';
    out += desc.tokens[i].surface;
  }
  return out;
}

std::string NormalizeWhitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

void ObjectVocabulary::Add(const std::string& canonical,
                           const std::vector<std::string>& synonyms) {
  const std::string label = SurfaceKey(canonical);
  if (entries_.count(label)) {
    throw InputError("duplicate canonical label '" + label + "'");
  }
  std::set<std::string> surfaces{label};
  for (const auto& s : synonyms) {
    if (Trim(s).empty()) continue;
    surfaces.insert(SurfaceKey(s));
  }
  for (const auto& s : surfaces) {
    auto it = surface_to_canonical_.find(s);
    if (it != surface_to_canonical_.end() && it->second != label) {
      throw InputError("synonym '" + s + "' maps to both '" + it->second +
                       "' and '" + label + "'");
    }
  }
  for (const auto& s : surfaces) {
    surface_to_canonical_[s] = label;
    const int n = static_cast<int>(std::count(s.begin(), s.end(), ' ')) + 1;
    max_phrase_tokens_ = std::max(max_phrase_tokens_, n);
  }
  entries_.emplace(label, std::move(surfaces));
}

std::optional<std::string> ObjectVocabulary::Lookup(
    std::string_view surface) const {
  if (Trim(surface).empty()) return std::nullopt;
  auto it = surface_to_canonical_.find(SurfaceKey(surface));
  if (it == surface_to_canonical_.end()) return std::nullopt;
  return it->second;
}

std::vector<ObjectMention> ExtractMentions(const TokenizedDescription& desc,
                                           const ObjectVocabulary& vocab) {
  std::vector<std::string> lowered;
  lowered.reserve(desc.tokens.size());
  for (const Token& t : desc.tokens) lowered.push_back(AsciiLower(t.surface));

  std::vector<ObjectMention> out;
  const std::size_t n = desc.tokens.size();
  std::size_t i = 0;
  while (i < n) {
    const std::size_t longest =
        std::min<std::size_t>(vocab.max_phrase_tokens(), n - i);
    std::size_t matched = 0;
    std::optional<std::string> canonical;
    for (std::size_t len = longest; len >= 1; --len) {
      std::string key = lowered[i];
      for (std::size_t k = 1; k < len; ++k) key += ' ' + lowered[i + k];
      canonical = vocab.Lookup(key);
      if (canonical) {
        matched = len;
        break;
      }
    }
    if (!canonical) {
      ++i;
      continue;
    }
    const Token& first = desc.tokens[i];
    const Token& last = desc.tokens[i + matched - 1];
    ObjectMention m;
    m.canonical = *canonical;
    m.surface = desc.raw_text.substr(first.begin, last.end - first.begin);
    m.token_index = first.index;
    m.span = {first.index, last.index};
    if (first.logprob) m.uncertainty = 0.0 - *first.logprob;  // never -0
    out.push_back(std::move(m));
    i += matched;
  }
  return out;
}

std::vector<std::string> UniqueCanonicals(
    const std::vector<ObjectMention>& mentions) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& m : mentions) {
    if (seen.insert(m.canonical).second) out.push_back(m.canonical);
  }
  return out;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ObjectVocabulary ParseVocabulary(std::string_view contents) {
  ObjectVocabulary vocab;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) nl = contents.size();
    ++line_no;
    std::string_view line = Trim(contents.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;

    std::string_view head = line;
    std::string_view tail;
    if (auto colon = line.find(':'); colon != std::string_view::npos) {
      head = Trim(line.substr(0, colon));
      tail = line.substr(colon + 1);
    }
    if (head.empty()) {
      throw InputError(LinePrefix(line_no) + "missing canonical label");
    }
    std::vector<std::string> synonyms;
    while (!tail.empty()) {
      auto comma = tail.find(',');
      std::string_view item = Trim(tail.substr(0, comma));
      if (!item.empty()) synonyms.emplace_back(item);
      if (comma == std::string_view::npos) break;
      tail.remove_prefix(comma + 1);
    }
    try {
      vocab.Add(std::string(head), synonyms);
    } catch (const InputError& e) {
      throw InputError(LinePrefix(line_no) + e.what());
    }
  }
  if (vocab.size() == 0) throw InputError("vocabulary is empty");
  return vocab;
}

ObjectVocabulary LoadVocabulary(const std::filesystem::path& path) {
  try {
    return ParseVocabulary(ReadFile(path));
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.rfind("cannot open", 0) == 0) throw;
    throw InputError(path.string() + ": " + what);
  }
}

std::vector<TokenizedDescription> ParseCaptionCorpus(
    std::string_view contents) {
  std::vector<TokenizedDescription> corpus;
  std::unordered_set<std::string> ids;
  ForEachRecordLine(contents, [&](std::size_t line_no, const json& record) {
    std::string image_id = RequireString(record, "image_id", line_no);
    std::string text = RequireString(record, "text", line_no);
    if (!ids.insert(image_id).second) {
      throw InputError(LinePrefix(line_no) + "duplicate image_id '" +
                       image_id + "'");
    }
    auto tokens_it = record.find("tokens");
    if (tokens_it == record.end() || tokens_it->is_null()) {
      try {
        corpus.push_back(MakeDescription(std::move(image_id), std::move(text)));
      } catch (const PreconditionError& e) {
        throw InputError(LinePrefix(line_no) + e.what());
      }
      return;
    }
    if (!tokens_it->is_array()) {
      throw InputError(LinePrefix(line_no) + "'tokens' must be an array");
    }
    std::vector<std::pair<std::string, std::optional<double>>> tokens;
    for (const json& t : *tokens_it) {
      if (!t.is_object() || !t.contains("t") || !t["t"].is_string()) {
        throw InputError(LinePrefix(line_no) +
                         "token entries need a string field 't'");
      }
      std::optional<double> logp;
      if (auto lp = t.find("logp"); lp != t.end() && !lp->is_null()) {
        if (!lp->is_number()) {
          throw InputError(LinePrefix(line_no) + "'logp' must be a number");
        }
        logp = lp->get<double>();
      }
      tokens.emplace_back(t["t"].get<std::string>(), logp);
    }
    try {
      corpus.push_back(AlignTokens(std::move(image_id), std::move(text), tokens));
    } catch (const InputError& e) {
      throw InputError(LinePrefix(line_no) + e.what());
    }
  });
  if (corpus.empty()) Warn("caption corpus is empty");
  return corpus;
}

std::vector<TokenizedDescription> LoadCaptionCorpus(
    const std::filesystem::path& path) {
  const std::string contents = ReadFile(path);
  try {
    return ParseCaptionCorpus(contents);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<ImageAnnotation> ParseAnnotations(std::string_view contents,
                                              const ObjectVocabulary& vocab) {
  std::vector<ImageAnnotation> out;
  std::unordered_set<std::string> ids;
  ForEachRecordLine(contents, [&](std::size_t line_no, const json& record) {
    ImageAnnotation ann;
    ann.image_id = RequireString(record, "image_id", line_no);
    if (!ids.insert(ann.image_id).second) {
      throw InputError(LinePrefix(line_no) + "duplicate image_id '" +
                       ann.image_id + "'");
    }
    auto objects = record.find("objects");
    if (objects == record.end() || !objects->is_array()) {
      throw InputError(LinePrefix(line_no) + "missing array field 'objects'");
    }
    std::vector<std::string> unknown;
    for (const json& label : *objects) {
      if (!label.is_string()) {
        throw InputError(LinePrefix(line_no) + "object labels must be strings");
      }
      const auto raw = label.get<std::string>();
      if (auto canonical = vocab.Lookup(raw)) {
        ann.ground_truth.insert(*canonical);
      } else {
        unknown.push_back(raw);
      }
    }
    if (!unknown.empty()) {
      std::string list;
      for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
      throw InputError(LinePrefix(line_no) + "unknown object label(s): " + list);
    }
    out.push_back(std::move(ann));
  });
  return out;
}

std::vector<ImageAnnotation> LoadAnnotations(const std::filesystem::path& path,
                                             const ObjectVocabulary& vocab) {
  const std::string contents = ReadFile(path);
  try {
    return ParseAnnotations(contents, vocab);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace lure
