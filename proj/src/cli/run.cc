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

#include <functional>
#include <map>

#include "CLI11.hpp"
#include "commands.h"
#include "lure/cli.h"
#include "lure/errors.h"
#include "lure/log.h"
#include "output.h"

namespace lure::cli {
namespace {

using Command = std::function<void(const RunConfig&, OutputSet&, std::ostream&)>;

struct Subcommand {
  const char* name;
  const char* help;
  Command fn;
};

int Fail(std::ostream& err, int code, const std::string& message) {
  err << "lure: error: " << message << "\n";
  return code;
}

}  // namespace

int Run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Object hallucination toolkit for image captions", "lure"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  FlagOverrides flags;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", flags.seed, "seed for backend and random streams");
  app.add_option("--workers", flags.workers, "worker threads (output does not depend on it)");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--vocab", flags.vocab, "object vocabulary file");

  const std::vector<Subcommand> commands = {
      {"ingest-check", "load and validate inputs, report counts", CmdIngestCheck},
      {"chair", "CHAIR_I / CHAIR_S against ground-truth annotations", CmdChair},
      {"factors", "co-occurrence, uncertainty and position scores", CmdFactors},
      {"mask", "replace uncertain or late objects by the placeholder", CmdMask},
      {"revise", "mask, then send each caption to the revisor backend", CmdRevise},
      {"build-dataset", "build revisor training records", CmdBuildDataset},
      {"theory", "Monte Carlo check of the Gaussian-model error formulas", CmdTheory},
  };
  std::map<CLI::App*, const Subcommand*> by_app;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    by_app[sub] = &c;
    const std::string name = c.name;
    if (name == "theory") {
      sub->add_option("--experiment", flags.experiment, "single, theorem1 or theorem2");
      sub->add_option("--trials", flags.trials, "Monte Carlo trials per scheme");
      continue;
    }
    sub->add_option("--captions", flags.captions, "caption corpus (JSONL)");
    if (name == "ingest-check" || name == "chair" || name == "factors") {
      sub->add_option("--annotations", flags.annotations, "ground-truth objects (JSONL)");
    }
    if (name == "chair") sub->add_option("--method", flags.method, "row label in chair.csv");
    if (name == "factors") {
      sub->add_option("--bins", flags.bins, "histogram bins");
      sub->add_option("--eta", flags.eta, "position threshold");
    }
    if (name == "mask" || name == "revise" || name == "build-dataset") {
      sub->add_option("--gamma", flags.gamma, "uncertainty threshold");
      sub->add_option("--eta", flags.eta, "position threshold");
    }
    if (name == "revise" || name == "build-dataset") {
      sub->add_option("--backend", flags.backend_mode, "mock or http");
    }
    if (name == "build-dataset") {
      sub->add_option("--ground-truth", flags.ground_truth, "ground-truth captions (JSONL)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  const Subcommand* chosen = by_app.at(app.get_subcommands().front());
  try {
    const RunConfig config = ResolveConfig(
        config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt,
        flags);
    OutputSet outputs(config.output_dir, chosen->name);
    chosen->fn(config, outputs, out);
    outputs.Commit(config);
    return kExitOk;
  } catch (const ConfigError& e) {
    return Fail(err, kExitInput, e.what());
  } catch (const InputError& e) {
    return Fail(err, kExitInput, e.what());
  } catch (const PreconditionError& e) {
    return Fail(err, kExitInput, e.what());
  } catch (const ParseError& e) {
    return Fail(err, kExitInput, std::string(e.what()) + ": " + e.raw());
  } catch (const CorruptionError& e) {
    return Fail(err, kExitCorruption, e.what());
  } catch (const ProtocolError& e) {
    return Fail(err, kExitCorruption, e.what());
  } catch (const BackendUnavailable& e) {
    return Fail(err, kExitBackend, e.what());
  } catch (const std::exception& e) {
    return Fail(err, kExitFailure, e.what());
  }
}

}  // namespace lure::cli
