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

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace lure {

enum class LogLevel { kInfo, kWarning, kError };

using LogSink = std::function<void(LogLevel, std::string_view)>;

// Replaces the process-wide sink and returns the previous one. The default
// sink writes warnings and errors to stderr.
LogSink SetLogSink(LogSink sink);

void Log(LogLevel level, std::string_view message);

inline void Warn(std::string_view message) { Log(LogLevel::kWarning, message); }
inline void Info(std::string_view message) { Log(LogLevel::kInfo, message); }

// Collects every message emitted while in scope; restores the old sink on exit.
class ScopedLogCapture {
 public:
  ScopedLogCapture();
  ~ScopedLogCapture();
  ScopedLogCapture(const ScopedLogCapture&) = delete;
  ScopedLogCapture& operator=(const ScopedLogCapture&) = delete;

  const std::vector<std::string>& warnings() const { return warnings_; }
  bool Contains(std::string_view needle) const;

 private:
  LogSink previous_;
  std::vector<std::string> warnings_;
};

}  // namespace lure
