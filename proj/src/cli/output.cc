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

#include "output.h"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <system_error>

#include "lure/errors.h"
#include "lure/kernels/kernels.h"
#include "lure/log.h"

namespace lure::cli {
namespace {

namespace fs = std::filesystem;

std::string UtcTimestamp(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

OutputSet::OutputSet(fs::path out_dir, std::string command)
    : out_dir_(std::move(out_dir)),
      command_(std::move(command)),
      start_(std::chrono::steady_clock::now()),
      start_wall_(std::chrono::system_clock::now()) {
  std::error_code ec;
  fs::create_directories(out_dir_, ec);
  if (ec || !fs::is_directory(out_dir_)) {
    throw InputError("cannot create output directory: " + out_dir_.string());
  }
  staging_ = out_dir_ / (".staging-" + command_);
  fs::remove_all(staging_, ec);
  fs::create_directory(staging_, ec);
  if (ec) throw InputError("cannot create staging directory: " + staging_.string());
}

OutputSet::~OutputSet() {
  std::error_code ec;
  fs::remove_all(staging_, ec);
}

void OutputSet::Declare(const std::string& name) { declared_.push_back(name); }

void OutputSet::Stage(const std::string& name, const std::string& contents) {
  std::ofstream f(staging_ / name, std::ios::binary | std::ios::trunc);
  f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  f.close();
  if (!f) throw std::runtime_error("failed writing " + (staging_ / name).string());
}

void OutputSet::Write(const std::string& name, const std::string& contents) {
  Stage(name, contents);
  outputs_.push_back({name, Sha256Hex(contents), contents.size()});
}

void OutputSet::WriteLog(const std::string& name, const std::string& contents) {
  Stage(name, contents);
  logs_.push_back({name, Sha256Hex(contents), contents.size()});
}

void OutputSet::AddInput(const std::string& role, const fs::path& path) {
  const std::string bytes = ReadFile(path);
  inputs_.push_back({{"role", role},
                     {"path", path.string()},
                     {"sha256", Sha256Hex(bytes)},
                     {"bytes", bytes.size()}});
}

void OutputSet::Notice(const std::string& message) {
  Warn(message);
  notices_.push_back(message);
}

void OutputSet::Commit(const RunConfig& config) {
  using nlohmann::ordered_json;
  auto entries = [](const std::vector<Entry>& v) {
    ordered_json a = ordered_json::array();
    for (const auto& e : v) {
      a.push_back({{"name", e.name}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    }
    return a;
  };
  ordered_json manifest;
  // Everything under "reproducible" is a function of inputs, config and seed.
  ordered_json& r = manifest["reproducible"];
  r["command"] = command_;
  r["tool_version"] = kToolVersion;
  r["config"] = config.ToJson();
  r["inputs"] = inputs_;
  r["outputs"] = entries(outputs_);
  r["notices"] = notices_;
  ordered_json& run = manifest["run"];
  run["output_dir"] = config.output_dir.string();
  run["workers"] = config.workers;
  run["kernels"] = std::string(kernels::ActiveKernels().name);
  run["started_utc"] = UtcTimestamp(start_wall_);
  run["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  run["logs"] = entries(logs_);
  Stage("manifest.json", manifest.dump(2) + "\n");

  std::vector<std::string> written;
  for (const auto& e : outputs_) written.push_back(e.name);
  for (const auto& e : logs_) written.push_back(e.name);
  std::error_code ec;
  for (const auto& name : declared_) {
    if (std::find(written.begin(), written.end(), name) == written.end()) {
      fs::remove(out_dir_ / name, ec);
    }
  }
  written.push_back("manifest.json");
  for (const auto& name : written) {
    fs::rename(staging_ / name, out_dir_ / name, ec);
    if (ec) throw std::runtime_error("cannot move " + name + " into " + out_dir_.string());
  }
  committed_ = true;
}

}  // namespace lure::cli
