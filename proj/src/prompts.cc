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

#include "lure/prompts.h"

#include <algorithm>
#include <cctype>

#include "lure/corpus.h"
#include "lure/errors.h"
#include "lure/log.h"

namespace lure {
namespace {

constexpr std::string_view kCooccurBody =
    "List three other objects that you think are most likely to appear with "
    "the objects in the scene described below:\n"
    "{description}\n"
    "Output in strict accordance with the following format:\n"
    "Object one\n"
    "Object two\n"
    "Object three\n";

constexpr std::string_view kHallucinateBody =
    "Input caption: {description}\n"
    "co_objects list: {co_objects list}\n"
    "uncertain_objets list: {uncertain_objets list}\n"
    "Select one object from \"co_objects list\" and \"uncertain_objects list\" "
    "respectively and add it to \"Input caption\" to get \"Output caption\". "
    "(Try not to change the format)\n"
    "Output caption:";

constexpr std::size_t kMaxLabelWords = 4;

std::string_view TrimView(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string RenderList(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out + "]";
}

// "1. x", "2) x", "3: x", "- x", "* x", "• x" -> "x".
std::string_view StripEnumeration(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i < line.size() &&
      (line[i] == '.' || line[i] == ')' || line[i] == ':')) {
    line.remove_prefix(i + 1);
  } else if (!line.empty() && (line[0] == '-' || line[0] == '*')) {
    line.remove_prefix(1);
  } else if (line.rfind("\xE2\x80\xA2", 0) == 0) {
    line.remove_prefix(3);
  }
  return TrimView(line);
}

}  // namespace

PromptTemplate::PromptTemplate(PromptKind kind, std::string body)
    : kind_(kind), body_(std::move(body)) {
  for (std::size_t i = 0; i < body_.size(); ++i) {
    if (body_[i] == '{' && i + 1 < body_.size() && body_[i + 1] == '{') {
      ++i;
      continue;
    }
    if (body_[i] != '{') continue;
    const auto close = body_.find('}', i);
    if (close == std::string::npos) {
      throw PreconditionError("unterminated slot in prompt template");
    }
    std::string name = body_.substr(i + 1, close - i - 1);
    if (std::find(slots_.begin(), slots_.end(), name) == slots_.end()) {
      slots_.push_back(std::move(name));
    }
    i = close;
  }
}

std::string PromptTemplate::Render(
    const std::map<std::string, std::string>& values) const {
  for (const auto& [name, _] : values) {
    if (std::find(slots_.begin(), slots_.end(), name) == slots_.end()) {
      throw PreconditionError("prompt template has no slot '" + name + "'");
    }
  }
  std::string out;
  for (std::size_t i = 0; i < body_.size(); ++i) {
    const char c = body_[i];
    if ((c == '{' || c == '}') && i + 1 < body_.size() && body_[i + 1] == c) {
      out += c;
      ++i;
      continue;
    }
    if (c != '{') {
      out += c;
      continue;
    }
    const auto close = body_.find('}', i);
    const std::string name = body_.substr(i + 1, close - i - 1);
    auto it = values.find(name);
    if (it == values.end()) {
      throw PreconditionError("unresolved prompt slot '" + name + "'");
    }
    out += it->second;
    i = close;
  }
  return out;
}

const PromptTemplate& PromptTemplate::CooccurList() {
  static const PromptTemplate t(PromptKind::kCooccurList, std::string(kCooccurBody));
  return t;
}

const PromptTemplate& PromptTemplate::HallucinateCaption() {
  static const PromptTemplate t(PromptKind::kHallucinateCaption,
                                std::string(kHallucinateBody));
  return t;
}

std::string BuildCooccurPrompt(std::string_view description) {
  if (TrimView(description).empty()) {
    throw PreconditionError("co-occurrence prompt needs a description");
  }
  return PromptTemplate::CooccurList().Render(
      {{"description", std::string(description)}});
}

std::string BuildHallucinationPrompt(
    std::string_view caption, const std::vector<std::string>& co_objects,
    const std::vector<std::string>& uncertain_objects) {
  if (TrimView(caption).empty()) {
    throw PreconditionError("hallucination prompt needs a caption");
  }
  if (co_objects.empty()) Warn("co_objects list is empty");
  if (uncertain_objects.empty()) Warn("uncertain_objects list is empty");
  return PromptTemplate::HallucinateCaption().Render(
      {{"description", std::string(caption)},
       {"co_objects list", RenderList(co_objects)},
       {"uncertain_objets list", RenderList(uncertain_objects)}});
}

std::vector<std::string> ParseCooccurResponse(std::string_view text) {
  std::vector<std::string> labels;
  std::size_t pos = 0;
  while (pos <= text.size() && labels.size() < 3) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = TrimView(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) continue;
    line = StripEnumeration(line);
    while (!line.empty() && (line.back() == '.' || line.back() == ',')) {
      line.remove_suffix(1);
    }
    line = TrimView(line);
    const auto words = std::count(line.begin(), line.end(), ' ') + 1;
    if (line.empty() || line.find(':') != std::string_view::npos ||
        static_cast<std::size_t>(words) > kMaxLabelWords) {
      Warn("skipping non-label line in co-occurrence response: " +
           std::string(line));
      continue;
    }
    labels.push_back(AsciiLower(NormalizeWhitespace(line)));
  }
  if (labels.empty()) {
    throw ParseError("no object labels in co-occurrence response",
                     std::string(text));
  }
  return labels;
}

std::string ParseHallucinationResponse(std::string_view text) {
  std::string_view body = TrimView(text);
  constexpr std::string_view kEcho = "Output caption:";
  if (body.rfind(kEcho, 0) == 0) body = TrimView(body.substr(kEcho.size()));
  if (body.empty()) {
    throw ParseError("empty hallucinated caption", std::string(text));
  }
  return std::string(body);
}

}  // namespace lure
