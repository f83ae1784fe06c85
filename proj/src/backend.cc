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

#include "lure/backend.h"

#include <array>
#include <chrono>
#include <ctime>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "lure/errors.h"

namespace lure {
namespace {

using nlohmann::json;

std::string UtcTimestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      now.time_since_epoch()) % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms.count()));
  return out;
}

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t SplitMix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::array<std::string_view, 12> kMockPool = {
    "bench", "chair", "cup", "bottle", "car", "umbrella",
    "backpack", "handbag", "clock", "potted plant", "bicycle", "bird"};

// Text between `open` and the next `close` (or end of text).
std::string_view Between(std::string_view text, std::string_view open,
                         std::string_view close) {
  auto b = text.find(open);
  if (b == std::string_view::npos) return {};
  b += open.size();
  auto e = text.find(close, b);
  if (e == std::string_view::npos) e = text.size();
  return text.substr(b, e - b);
}

// One item of a rendered "[a, b]" list chosen by `pick`, or empty.
std::string PickListItem(std::string_view list, std::uint64_t pick) {
  if (list.size() < 2 || list.front() != '[' || list.back() != ']') return {};
  list = list.substr(1, list.size() - 2);
  std::vector<std::string_view> items;
  while (!list.empty()) {
    auto comma = list.find(", ");
    items.push_back(list.substr(0, comma));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 2);
  }
  if (items.empty()) return {};
  return std::string(items[pick % items.size()]);
}

}  // namespace

void ExchangeLog::Record(std::string_view backend_id, std::string_view endpoint,
                         std::string_view request, std::string_view response,
                         int attempt) {
  if (!out_) return;
  json entry = {{"ts", UtcTimestamp()},
                {"backend", backend_id},
                {"endpoint", endpoint},
                {"attempt", attempt},
                {"request", request},
                {"response", response}};
  std::lock_guard<std::mutex> lock(mu_);
  *out_ << entry.dump() << '\n';
}

ReviseResponse Revise(const ReviseRequest& request, RevisorBackend& backend) {
  std::string revised = backend.ReviseText(request);
  if (revised.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ProtocolError("backend '" + backend.id() +
                        "' returned an empty revision for '" +
                        request.image_id + "'");
  }
  return {std::move(revised), backend.id()};
}

HttpBackend::HttpBackend(HttpBackendOptions options)
    : options_(std::move(options)) {
  const std::string& url = options_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.empty()) {
    throw ConfigError("backend.base_url must look like http://host:port, got '" +
                      url + "'");
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_begin);
  if (path_begin != std::string::npos) {
    path_prefix_ = url.substr(path_begin);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') {
      path_prefix_.pop_back();
    }
  }
  if (options_.retries < 0) throw ConfigError("backend.retries must be >= 0");
}

std::string HttpBackend::id() const { return "http:" + options_.base_url; }

std::string HttpBackend::Post(const std::string& path, const std::string& body,
                              const char* result_field) {
  const std::string endpoint = path_prefix_ + path;
  std::string last_error;
  int delay_ms = options_.backoff_ms;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      delay_ms *= 2;
    }
    httplib::Client client(scheme_host_port_);
    const auto timeout = std::chrono::milliseconds(options_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto result = client.Post(endpoint, body, "application/json");
    if (!result) {
      last_error = httplib::to_string(result.error());
      if (options_.log) options_.log->Record(id(), endpoint, body, "transport error: " + last_error, attempt);
      continue;
    }
    if (options_.log) options_.log->Record(id(), endpoint, body, result->body, attempt);
    if (result->status >= 500) {
      last_error = "HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      throw ProtocolError(endpoint + " answered HTTP " +
                          std::to_string(result->status));
    }
    json parsed;
    try {
      parsed = json::parse(result->body);
    } catch (const json::parse_error&) {
      throw ProtocolError(endpoint + " returned a body that is not JSON");
    }
    if (!parsed.is_object() || !parsed.contains(result_field) ||
        !parsed[result_field].is_string()) {
      throw ProtocolError(endpoint + " response lacks string field '" +
                          result_field + "'");
    }
    return parsed[result_field].get<std::string>();
  }
  throw BackendUnavailable("backend " + options_.base_url + endpoint +
                           " unavailable after " +
                           std::to_string(options_.retries + 1) +
                           " attempt(s): " + last_error);
}

std::string HttpBackend::ReviseText(const ReviseRequest& request) {
  json body = {{"image_id", request.image_id},
               {"masked_text", request.masked_text},
               {"context", request.context ? json(*request.context) : json(nullptr)}};
  return Post("/v1/revise", body.dump(), "revised_text");
}

std::string HttpBackend::Complete(const std::string& prompt) {
  return Post("/v1/complete", json{{"prompt", prompt}}.dump(), "text");
}

MockBackend::MockBackend(std::uint64_t seed, std::string placeholder,
                         ExchangeLog* log)
    : seed_(seed), placeholder_(std::move(placeholder)), log_(log) {}

std::string MockBackend::ReviseText(const ReviseRequest& request) {
  std::string out;
  const std::string& text = request.masked_text;
  std::size_t cursor = 0;
  for (auto p = text.find(placeholder_); p != std::string::npos;
       p = text.find(placeholder_, cursor)) {
    out.append(text, cursor, p - cursor);
    out += kFillToken;
    cursor = p + placeholder_.size();
  }
  out.append(text, cursor, std::string::npos);
  if (log_) log_->Record(id(), "/v1/revise", request.masked_text, out, 0);
  return out;
}

std::string MockBackend::Complete(const std::string& prompt) {
  std::uint64_t state = Fnv1a(prompt) ^ seed_;
  std::string out;
  if (prompt.rfind("List three other objects", 0) == 0) {
    std::vector<std::string_view> picked;
    while (picked.size() < 3) {
      const auto item = kMockPool[SplitMix(state) % kMockPool.size()];
      if (std::find(picked.begin(), picked.end(), item) == picked.end()) {
        picked.push_back(item);
      }
    }
    for (const auto& p : picked) out += std::string(p) + "\n";
  } else if (prompt.rfind("Input caption: ", 0) == 0) {
    std::string caption(Between(prompt, "Input caption: ", "\nco_objects list: "));
    const std::string co = PickListItem(
        Between(prompt, "co_objects list: ", "\n"), SplitMix(state));
    const std::string unc = PickListItem(
        Between(prompt, "uncertain_objets list: ", "\n"), SplitMix(state));
    while (!caption.empty() && (caption.back() == '.' || caption.back() == ' ')) {
      caption.pop_back();
    }
    out = caption;
    if (!co.empty() && !unc.empty()) {
      out += ", with a " + co + " and a " + unc;
    } else if (!co.empty() || !unc.empty()) {
      out += ", with a " + (co.empty() ? unc : co);
    }
    out += ".";
  } else {
    out = prompt;
  }
  if (log_) log_->Record(id(), "/v1/complete", prompt, out, 0);
  return out;
}

}  // namespace lure
