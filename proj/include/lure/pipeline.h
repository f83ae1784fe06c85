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

#include <string>
#include <vector>

#include "lure/backend.h"
#include "lure/corpus.h"
#include "lure/masker.h"

namespace lure {

// One revisor training example: the masked hallucinatory caption is the
// input, the ground-truth caption the target.
struct TrainingRecord {
  std::string image_id;
  std::vector<std::string> co_objects;
  std::vector<std::string> uncertain_objects;
  std::string hallucinatory_caption;
  MaskedDescription masked;  // masked.masked_text is the masked caption
  std::string target_caption;
};

struct SkippedImage {
  std::string image_id;
  std::string reason;
};

struct DatasetOptions {
  int max_in_flight = 1;
  double max_skip_fraction = 0.5;
};

struct DatasetResult {
  std::vector<TrainingRecord> records;  // ground-truth input order
  std::vector<SkippedImage> skipped;
};

// For every ground-truth caption: ask the backend for co-occurring objects,
// collect the generated description's objects with UnScore >= gamma, ask the
// backend to rewrite the caption with both lists, then mask the rewrite.
// Images whose round fails are skipped; InputError if more than
// max_skip_fraction of them are.
DatasetResult BuildTrainingRecords(
    const std::vector<TokenizedDescription>& ground_truth,
    const std::vector<TokenizedDescription>& generated,
    const ObjectVocabulary& vocab, const MaskPolicy& policy,
    RevisorBackend& backend, const DatasetOptions& options = {});

struct RevisedRecord {
  std::string image_id;
  MaskedDescription masked;
  std::string revised_text;
  std::string backend_id;
};

// Inference pipeline: mask each description, then send it to the revisor.
std::vector<RevisedRecord> ReviseCorpus(
    const std::vector<TokenizedDescription>& corpus,
    const ObjectVocabulary& vocab, const MaskPolicy& policy,
    RevisorBackend& backend, int max_in_flight = 1);

}  // namespace lure
