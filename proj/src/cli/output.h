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

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "lure/cli.h"

namespace lure::cli {

// Files of one command run. Everything is written into a staging directory
// inside the output directory and only moved into place by Commit(); if the
// run throws first, the destructor deletes the staging directory.
class OutputSet {
 public:
  OutputSet(std::filesystem::path out_dir, std::string command);
  ~OutputSet();
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  // Names this command may produce. Declared files not written by this run
  // are deleted from the output directory on commit so no stale copy stays.
  void Declare(const std::string& name);
  void Write(const std::string& name, const std::string& contents);
  // Logs carry timestamps; they are listed apart from the outputs.
  void WriteLog(const std::string& name, const std::string& contents);
  void AddInput(const std::string& role, const std::filesystem::path& path);
  void Notice(const std::string& message);

  void Commit(const RunConfig& config);

 private:
  struct Entry {
    std::string name;
    std::string sha256;
    std::size_t bytes = 0;
  };
  void Stage(const std::string& name, const std::string& contents);

  std::filesystem::path out_dir_;
  std::filesystem::path staging_;
  std::string command_;
  std::vector<std::string> declared_;
  std::vector<Entry> outputs_;
  std::vector<Entry> logs_;
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
  std::vector<std::string> notices_;
  std::chrono::steady_clock::time_point start_;
  std::chrono::system_clock::time_point start_wall_;
  bool committed_ = false;
};

}  // namespace lure::cli
