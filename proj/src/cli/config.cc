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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include <openssl/evp.h>

#include "lure/cli.h"
#include "lure/corpus.h"
#include "lure/errors.h"

#ifndef LURE_DEFAULT_VOCAB
#define LURE_DEFAULT_VOCAB "data/coco_objects.txt"
#endif

namespace lure::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void RejectUnknownKeys(const json& j, const std::set<std::string>& known,
                       const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError("unknown config key '" + where + key + "'");
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + where + key + "' has the wrong type");
  }
}

void ReadPath(const json& j, const char* key, fs::path& dst, const fs::path& base) {
  std::string s;
  Read(j, key, s, "");
  if (s.empty()) return;
  fs::path p(s);
  dst = p.is_absolute() ? p : base / p;
}

void ApplyTheoryJson(const json& j, theory::TheoryConfig& t) {
  const std::string where = "theory.";
  RejectUnknownKeys(j, {"experiment", "d", "K", "N", "mu_norms_sq", "rho0", "rho",
                        "gamma_u", "trials", "test_size", "sigmoid_sign",
                        "selected_share", "phat_samples", "test_sampling"},
                    where);
  std::string s;
  if (j.contains("experiment")) {
    Read(j, "experiment", s, where);
    t.experiment = theory::ParseExperiment(s);
  }
  Read(j, "d", t.d, where);
  Read(j, "K", t.K, where);
  Read(j, "N", t.N, where);
  Read(j, "mu_norms_sq", t.mu_norms_sq, where);
  Read(j, "rho0", t.rho0, where);
  Read(j, "rho", t.rho, where);
  Read(j, "gamma_u", t.gamma_u, where);
  Read(j, "trials", t.trials, where);
  Read(j, "test_size", t.test_size, where);
  if (j.contains("sigmoid_sign")) {
    Read(j, "sigmoid_sign", s, where);
    t.sigmoid_sign = theory::ParseSigmoidSign(s);
  }
  Read(j, "selected_share", t.selected_share, where);
  Read(j, "phat_samples", t.phat_samples, where);
  if (j.contains("test_sampling")) {
    Read(j, "test_sampling", s, where);
    t.test_sampling = theory::ParseTestSampling(s);
  }
}

}  // namespace

fs::path DefaultVocabularyPath() {
  if (const char* env = std::getenv("LURE_VOCAB"); env && *env) return env;
  return LURE_DEFAULT_VOCAB;
}

void ApplyConfigJson(const json& j, const fs::path& base_dir, RunConfig& c) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  RejectUnknownKeys(j, {"vocab_path", "caption_path", "annotation_path",
                        "ground_truth_path", "output_dir", "method", "gamma", "eta",
                        "placeholder", "position_length_source", "bins",
                        "max_skip_fraction", "backend", "seed", "workers", "theory"},
                    "");
  ReadPath(j, "vocab_path", c.vocab_path, base_dir);
  ReadPath(j, "caption_path", c.caption_path, base_dir);
  ReadPath(j, "annotation_path", c.annotation_path, base_dir);
  ReadPath(j, "ground_truth_path", c.ground_truth_path, base_dir);
  ReadPath(j, "output_dir", c.output_dir, base_dir);
  Read(j, "method", c.method, "");
  Read(j, "gamma", c.policy.gamma, "");
  Read(j, "eta", c.policy.eta, "");
  Read(j, "placeholder", c.policy.placeholder, "");
  if (j.contains("position_length_source")) {
    std::string s;
    Read(j, "position_length_source", s, "");
    if (s == "caption") {
      c.policy.position_length_source = LengthSource::kCaption;
    } else if (s == "generated") {
      c.policy.position_length_source = LengthSource::kGenerated;
    } else {
      throw ConfigError("position_length_source must be 'caption' or 'generated'");
    }
  }
  Read(j, "bins", c.bins, "");
  Read(j, "max_skip_fraction", c.max_skip_fraction, "");
  if (j.contains("seed")) {
    std::uint64_t seed = 0;
    Read(j, "seed", seed, "");
    c.seed = seed;
  }
  Read(j, "workers", c.workers, "");
  if (j.contains("backend")) {
    const json& b = j.at("backend");
    if (!b.is_object()) throw ConfigError("config key 'backend' must be an object");
    RejectUnknownKeys(b, {"mode", "base_url", "max_in_flight", "retries",
                          "timeout_ms", "backoff_ms"},
                      "backend.");
    Read(b, "mode", c.backend.mode, "backend.");
    Read(b, "base_url", c.backend.base_url, "backend.");
    Read(b, "max_in_flight", c.backend.max_in_flight, "backend.");
    Read(b, "retries", c.backend.retries, "backend.");
    Read(b, "timeout_ms", c.backend.timeout_ms, "backend.");
    Read(b, "backoff_ms", c.backend.backoff_ms, "backend.");
  }
  if (j.contains("theory")) {
    if (!j.at("theory").is_object()) {
      throw ConfigError("config key 'theory' must be an object");
    }
    ApplyTheoryJson(j.at("theory"), c.theory);
  }
}

RunConfig ResolveConfig(const std::optional<fs::path>& config_file,
                        const FlagOverrides& f) {
  RunConfig c;
  c.vocab_path = DefaultVocabularyPath();
  if (config_file) {
    std::string text;
    try {
      text = ReadFile(*config_file);
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(config_file->string() + ": not valid JSON: " + e.what());
    }
    ApplyConfigJson(j, config_file->parent_path(), c);
  }
  if (const char* url = std::getenv("LURE_BACKEND_URL"); url && *url) {
    c.backend.base_url = url;
  }
  if (f.vocab) c.vocab_path = *f.vocab;
  if (f.captions) c.caption_path = *f.captions;
  if (f.annotations) c.annotation_path = *f.annotations;
  if (f.ground_truth) c.ground_truth_path = *f.ground_truth;
  if (f.out) c.output_dir = *f.out;
  if (f.method) c.method = *f.method;
  if (f.backend_mode) c.backend.mode = *f.backend_mode;
  if (f.gamma) c.policy.gamma = *f.gamma;
  if (f.eta) c.policy.eta = *f.eta;
  if (f.bins) c.bins = *f.bins;
  if (f.workers) c.workers = *f.workers;
  if (f.seed) c.seed = *f.seed;
  if (f.experiment) c.theory.experiment = theory::ParseExperiment(*f.experiment);
  if (f.trials) c.theory.trials = *f.trials;

  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  if (c.bins < 1) throw ConfigError("bins must be >= 1");
  if (c.backend.mode != "mock" && c.backend.mode != "http") {
    throw ConfigError("backend.mode must be 'mock' or 'http'");
  }
  if (c.backend.max_in_flight < 1) throw ConfigError("backend.max_in_flight must be >= 1");
  if (c.backend.retries < 0) throw ConfigError("backend.retries must be >= 0");
  if (c.backend.timeout_ms < 1) throw ConfigError("backend.timeout_ms must be >= 1");
  if (c.backend.backoff_ms < 0) throw ConfigError("backend.backoff_ms must be >= 0");
  if (!(c.max_skip_fraction >= 0.0 && c.max_skip_fraction <= 1.0)) {
    throw ConfigError("max_skip_fraction must lie in [0, 1]");
  }
  c.policy.Validate();
  return c;
}

nlohmann::ordered_json RunConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["vocab_path"] = vocab_path.string();
  j["caption_path"] = caption_path.string();
  j["annotation_path"] = annotation_path.string();
  j["ground_truth_path"] = ground_truth_path.string();
  j["method"] = method;
  j["gamma"] = policy.gamma;
  j["eta"] = policy.eta;
  j["placeholder"] = policy.placeholder;
  j["position_length_source"] =
      policy.position_length_source == LengthSource::kCaption ? "caption" : "generated";
  j["bins"] = bins;
  j["max_skip_fraction"] = max_skip_fraction;
  j["backend"] = {{"mode", backend.mode},
                  {"base_url", backend.base_url},
                  {"max_in_flight", backend.max_in_flight},
                  {"retries", backend.retries},
                  {"timeout_ms", backend.timeout_ms},
                  {"backoff_ms", backend.backoff_ms}};
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json();
  nlohmann::ordered_json t;
  t["experiment"] = theory::ToString(theory.experiment);
  t["d"] = theory.d;
  t["K"] = theory.K;
  t["N"] = theory.N;
  t["mu_norms_sq"] = theory.mu_norms_sq;
  t["rho0"] = theory.rho0;
  t["rho"] = theory.rho;
  t["gamma_u"] = theory.gamma_u;
  t["trials"] = theory.trials;
  t["test_size"] = theory.test_size;
  t["sigmoid_sign"] = theory::ToString(theory.sigmoid_sign);
  t["selected_share"] = theory.selected_share;
  t["phat_samples"] = theory.phat_samples;
  t["test_sampling"] = theory::ToString(theory.test_sampling);
  j["theory"] = t;
  return j;
}

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* kHex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string Sha256File(const fs::path& path) { return Sha256Hex(ReadFile(path)); }

std::string FormatReal(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

}  // namespace lure::cli
