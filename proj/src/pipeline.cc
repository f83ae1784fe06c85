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

#include "lure/pipeline.h"

#include <optional>
#include <unordered_map>
#include <variant>

#include "lure/errors.h"
#include "lure/log.h"
#include "lure/parallel.h"
#include "lure/prompts.h"

namespace lure {
namespace {

std::vector<std::string> UncertainObjects(const TokenizedDescription& generated,
                                          const ObjectVocabulary& vocab,
                                          double gamma) {
  std::vector<ObjectMention> uncertain;
  for (auto& m : ExtractMentions(generated, vocab)) {
    if (m.uncertainty && *m.uncertainty >= gamma) uncertain.push_back(std::move(m));
  }
  return UniqueCanonicals(uncertain);
}

}  // namespace

DatasetResult BuildTrainingRecords(
    const std::vector<TokenizedDescription>& ground_truth,
    const std::vector<TokenizedDescription>& generated,
    const ObjectVocabulary& vocab, const MaskPolicy& policy,
    RevisorBackend& backend, const DatasetOptions& options) {
  policy.Validate();
  std::unordered_map<std::string, const TokenizedDescription*> generated_by_id;
  for (const auto& g : generated) generated_by_id[g.image_id] = &g;

  using Outcome = std::variant<TrainingRecord, SkippedImage>;
  auto outcomes = ParallelMap(
      ground_truth.size(), options.max_in_flight, [&](std::size_t i) -> Outcome {
        const TokenizedDescription& gt = ground_truth[i];
        auto it = generated_by_id.find(gt.image_id);
        if (it == generated_by_id.end()) {
          return SkippedImage{gt.image_id, "no generated description"};
        }
        try {
          TrainingRecord r;
          r.image_id = gt.image_id;
          r.target_caption = gt.raw_text;
          r.co_objects =
              ParseCooccurResponse(backend.Complete(BuildCooccurPrompt(gt.raw_text)));
          r.uncertain_objects = UncertainObjects(*it->second, vocab, policy.gamma);
          r.hallucinatory_caption = ParseHallucinationResponse(backend.Complete(
              BuildHallucinationPrompt(gt.raw_text, r.co_objects, r.uncertain_objects)));
          r.masked = MaskTrainingCaption(r.hallucinatory_caption, *it->second,
                                         vocab, policy);
          return r;
        } catch (const ParseError& e) {
          return SkippedImage{gt.image_id, std::string(e.what()) + ": " + e.raw()};
        } catch (const ProtocolError& e) {
          return SkippedImage{gt.image_id, e.what()};
        } catch (const BackendUnavailable& e) {
          return SkippedImage{gt.image_id, e.what()};
        } catch (const PreconditionError& e) {
          return SkippedImage{gt.image_id, e.what()};
        }
      });

  DatasetResult result;
  for (auto& o : outcomes) {
    if (auto* r = std::get_if<TrainingRecord>(&o)) {
      result.records.push_back(std::move(*r));
    } else {
      auto& s = std::get<SkippedImage>(o);
      Warn("skipping image '" + s.image_id + "': " + s.reason);
      result.skipped.push_back(std::move(s));
    }
  }
  if (!ground_truth.empty() &&
      static_cast<double>(result.skipped.size()) >
          options.max_skip_fraction * static_cast<double>(ground_truth.size())) {
    throw InputError("skipped " + std::to_string(result.skipped.size()) + " of " +
                     std::to_string(ground_truth.size()) +
                     " images, above the allowed fraction");
  }
  return result;
}

std::vector<RevisedRecord> ReviseCorpus(
    const std::vector<TokenizedDescription>& corpus,
    const ObjectVocabulary& vocab, const MaskPolicy& policy,
    RevisorBackend& backend, int max_in_flight) {
  policy.Validate();
  return ParallelMap(corpus.size(), max_in_flight, [&](std::size_t i) {
    const TokenizedDescription& d = corpus[i];
    RevisedRecord r;
    r.image_id = d.image_id;
    r.masked = MaskDescription(d, vocab, policy);
    ReviseResponse response =
        Revise(ReviseRequest{d.image_id, r.masked.masked_text, std::nullopt}, backend);
    r.revised_text = std::move(response.revised_text);
    r.backend_id = std::move(response.backend_id);
    return r;
  });
}

}  // namespace lure
