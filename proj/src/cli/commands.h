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

#include <ostream>

#include "lure/cli.h"

namespace lure::cli {

class OutputSet;

void CmdIngestCheck(const RunConfig& config, OutputSet& out, std::ostream& log);
void CmdChair(const RunConfig& config, OutputSet& out, std::ostream& log);
void CmdFactors(const RunConfig& config, OutputSet& out, std::ostream& log);
void CmdMask(const RunConfig& config, OutputSet& out, std::ostream& log);
void CmdRevise(const RunConfig& config, OutputSet& out, std::ostream& log);
void CmdBuildDataset(const RunConfig& config, OutputSet& out, std::ostream& log);
void CmdTheory(const RunConfig& config, OutputSet& out, std::ostream& log);

}  // namespace lure::cli
