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
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "lure/masker.h"
#include "lure/theory.h"

namespace lure::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInput = 2,       // bad input, config or usage
  kExitCorruption = 3,  // corrupted masks, malformed backend replies
  kExitBackend = 4,     // backend unreachable after retries
};

struct BackendSettings {
  std::string mode = "mock";  // "mock" or "http"
  std::string base_url;
  int max_in_flight = 1;
  int retries = 3;
  int timeout_ms = 30000;
  int backoff_ms = 200;
};

struct RunConfig {
  std::filesystem::path vocab_path;
  std::filesystem::path caption_path;
  std::filesystem::path annotation_path;
  std::filesystem::path ground_truth_path;  // build-dataset targets
  std::filesystem::path output_dir = "lure_out";
  std::string method = "captions";  // row label of the CHAIR table
  MaskPolicy policy;
  int bins = 10;
  double max_skip_fraction = 0.5;
  BackendSettings backend;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  theory::TheoryConfig theory;

  nlohmann::ordered_json ToJson() const;
};

// Values set on the command line; unset fields fall through to the file.
struct FlagOverrides {
  std::optional<std::string> vocab, captions, annotations, ground_truth, out,
      method, backend_mode, experiment;
  std::optional<double> gamma, eta;
  std::optional<int> bins, workers, trials;
  std::optional<std::uint64_t> seed;
};

std::filesystem::path DefaultVocabularyPath();

// Defaults, then the JSON config file (relative paths resolve against its
// directory), then LURE_BACKEND_URL, then flags. Throws ConfigError.
RunConfig ResolveConfig(const std::optional<std::filesystem::path>& config_file,
                        const FlagOverrides& flags);
void ApplyConfigJson(const nlohmann::json& j, const std::filesystem::path& base_dir,
                     RunConfig& config);

std::string Sha256Hex(std::string_view bytes);
std::string Sha256File(const std::filesystem::path& path);

// 6 significant digits, '.' decimal point.
std::string FormatReal(double value);

// Entry point of the lure executable.
int Run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace lure::cli
