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

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace lure {

struct ReviseRequest {
  std::string image_id;
  std::string masked_text;
  std::optional<std::string> context;
};

struct ReviseResponse {
  std::string revised_text;
  std::string backend_id;
};

// Thread-safe, line-delimited log of backend exchanges. Entries carry
// wall-clock timestamps, so the log is never part of reproducible output.
class ExchangeLog {
 public:
  explicit ExchangeLog(std::ostream* out) : out_(out) {}
  void Record(std::string_view backend_id, std::string_view endpoint,
              std::string_view request, std::string_view response,
              int attempt);

 private:
  std::ostream* out_;
  std::mutex mu_;
};

// The revisor and the prompt-completion model behind one wire protocol.
// Implementations must be safe to call concurrently.
class RevisorBackend {
 public:
  virtual ~RevisorBackend() = default;
  virtual std::string id() const = 0;
  // Returns the raw revised text for a masked description.
  virtual std::string ReviseText(const ReviseRequest& request) = 0;
  // Returns the raw completion for a prompt.
  virtual std::string Complete(const std::string& prompt) = 0;
};

// Calls the backend and checks the response. ProtocolError on an empty
// revision; BackendUnavailable passes through.
ReviseResponse Revise(const ReviseRequest& request, RevisorBackend& backend);

struct HttpBackendOptions {
  std::string base_url;       // e.g. http://127.0.0.1:8080
  int retries = 3;            // extra attempts after the first
  int timeout_ms = 30000;
  int backoff_ms = 200;       // doubled after every failed attempt
  ExchangeLog* log = nullptr;
};

// POST {base_url}/v1/revise  {image_id, masked_text, context} -> {revised_text}
// POST {base_url}/v1/complete {prompt} -> {text}
class HttpBackend : public RevisorBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  std::string id() const override;
  std::string ReviseText(const ReviseRequest& request) override;
  std::string Complete(const std::string& prompt) override;

 private:
  std::string Post(const std::string& path, const std::string& body,
                   const char* result_field);

  HttpBackendOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

// Deterministic offline stand-in. Revision replaces every placeholder with
// "thing". Completions pick objects from a fixed pool by hashing the prompt
// with the seed.
class MockBackend : public RevisorBackend {
 public:
  explicit MockBackend(std::uint64_t seed, std::string placeholder = "[IDK]",
                       ExchangeLog* log = nullptr);
  std::string id() const override { return "mock"; }
  std::string ReviseText(const ReviseRequest& request) override;
  std::string Complete(const std::string& prompt) override;

  static constexpr std::string_view kFillToken = "thing";

 private:
  std::uint64_t seed_;
  std::string placeholder_;
  ExchangeLog* log_;
};

}  // namespace lure
