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

#include "commands.h"

#include <cstdio>
#include <memory>
#include <set>
#include <sstream>

#include "lure/backend.h"
#include "lure/chair.h"
#include "lure/corpus.h"
#include "lure/errors.h"
#include "lure/factors.h"
#include "lure/masker.h"
#include "lure/parallel.h"
#include "lure/pipeline.h"
#include "lure/theory.h"
#include "output.h"

namespace lure::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void RequirePath(const fs::path& path, const char* what, const char* flag) {
  if (path.empty()) {
    throw ConfigError(std::string("no ") + what + " given (" + flag + ")");
  }
  if (!fs::is_regular_file(path)) {
    throw InputError(std::string(what) + " not found: " + path.string());
  }
}

std::uint64_t RequireSeed(const RunConfig& c, const char* command) {
  if (!c.seed) {
    throw ConfigError(std::string(command) + " needs a seed (--seed or config 'seed')");
  }
  return *c.seed;
}

struct Loaded {
  ObjectVocabulary vocab;
  std::vector<TokenizedDescription> captions;
  std::vector<ImageAnnotation> annotations;
};

Loaded LoadInputs(const RunConfig& c, OutputSet& out, bool need_annotations) {
  RequirePath(c.vocab_path, "vocabulary", "--vocab");
  RequirePath(c.caption_path, "caption corpus", "--captions");
  if (need_annotations) RequirePath(c.annotation_path, "annotation file", "--annotations");
  Loaded in;
  in.vocab = LoadVocabulary(c.vocab_path);
  out.AddInput("vocabulary", c.vocab_path);
  in.captions = LoadCaptionCorpus(c.caption_path);
  out.AddInput("captions", c.caption_path);
  if (need_annotations) {
    in.annotations = LoadAnnotations(c.annotation_path, in.vocab);
    out.AddInput("annotations", c.annotation_path);
  }
  return in;
}

void RequireNonEmpty(const std::vector<TokenizedDescription>& corpus,
                     const fs::path& path) {
  if (corpus.empty()) throw InputError("caption corpus is empty: " + path.string());
}

ordered_json Optional(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json();
}

ordered_json MentionJson(const ObjectMention& m) {
  return {{"canonical", m.canonical},
          {"surface", m.surface},
          {"token_index", m.token_index},
          {"token_span", {m.span.first, m.span.last}},
          {"uncertainty", Optional(m.uncertainty)}};
}

ordered_json RecordsJson(const std::vector<MaskRecord>& records) {
  ordered_json a = ordered_json::array();
  for (const auto& r : records) {
    a.push_back({{"original", r.original},
                 {"token_span", {r.token_span.first, r.token_span.last}},
                 {"reason", ToString(r.reason)},
                 {"offset", r.offset}});
  }
  return a;
}

void CheckRoundTrip(const MaskedDescription& m, const std::string& original) {
  if (Unmask(m) != original) {
    throw CorruptionError("'" + m.image_id + "': masked text does not restore its source");
  }
}

std::unique_ptr<RevisorBackend> MakeBackend(const RunConfig& c, std::uint64_t seed,
                                            ExchangeLog* log) {
  if (c.backend.mode == "mock") {
    return std::make_unique<MockBackend>(seed, c.policy.placeholder, log);
  }
  if (c.backend.base_url.empty()) {
    throw ConfigError("backend.mode is 'http' but no base_url (config or LURE_BACKEND_URL)");
  }
  HttpBackendOptions o;
  o.base_url = c.backend.base_url;
  o.retries = c.backend.retries;
  o.timeout_ms = c.backend.timeout_ms;
  o.backoff_ms = c.backend.backoff_ms;
  o.log = log;
  return std::make_unique<HttpBackend>(o);
}

template <typename Range, typename Fn>
std::string Jsonl(const Range& items, Fn&& to_json) {
  std::string s;
  for (const auto& item : items) {
    s += to_json(item).dump();
    s += '\n';
  }
  return s;
}

std::string Csv(const std::vector<std::vector<std::string>>& rows) {
  std::string s;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += row[i];
    }
    s += '\n';
  }
  return s;
}

void AddHistogramRows(const std::string& factor, const PairedHistogram& h,
                      std::vector<std::vector<std::string>>& rows) {
  for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
    rows.push_back({factor, std::to_string(b), FormatReal(h.edges[b]),
                    FormatReal(h.edges[b + 1]), std::to_string(h.hallucinated[b]),
                    std::to_string(h.real[b])});
  }
}

ordered_json HistogramJson(const PairedHistogram& h) {
  return {{"edges", h.edges}, {"hallucinated", h.hallucinated}, {"real", h.real}};
}

ordered_json EstimateJson(const theory::ErrorEstimate& e) {
  return {{"mean", e.mean}, {"se", e.se}, {"trials", e.trials}};
}

std::string Fixed(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

ordered_json TheoryJson(const theory::TheoryResult& r, const RunConfig& c) {
  ordered_json j;
  j["experiment"] = theory::ToString(r.experiment);
  j["config"] = c.ToJson()["theory"];
  j["config"]["seed"] = r.config.seed;
  j["status"] = r.status;
  j["outside_regime"] = r.outside_regime;
  j["regime_notes"] = r.regime_notes;
  j["kappa"] = r.kappa;
  ordered_json schemes = ordered_json::array();
  for (const auto& s : r.schemes) {
    ordered_json o;
    o["name"] = s.name;
    o["rho"] = Optional(s.rho);
    o["allocation"] = s.allocation;
    o["empirical"] = EstimateJson(s.empirical);
    o["closed_form"] = s.closed_form;
    ordered_json per = ordered_json::array();
    for (std::size_t k = 0; k < s.per_class_empirical.size(); ++k) {
      per.push_back({{"empirical", EstimateJson(s.per_class_empirical[k])},
                     {"closed_form", s.per_class_closed_form[k]}});
    }
    o["per_class"] = per;
    schemes.push_back(o);
  }
  j["schemes"] = schemes;
  if (r.verdict) {
    j["verdict"] = {{"direction", r.verdict->direction},
                    {"diff", r.verdict->diff},
                    {"diff_se", r.verdict->diff_se},
                    {"ci95", {r.verdict->ci95_low, r.verdict->ci95_high}}};
  } else {
    j["verdict"] = nullptr;
  }
  ordered_json phat = ordered_json::array();
  for (const auto& p : r.phat) {
    phat.push_back({{"sigmoid_sign", theory::ToString(p.sign)},
                    {"phat", p.phat},
                    {"uncertainty", p.uncertainty},
                    {"selected", p.selected}});
  }
  j["phat"] = phat;
  ordered_json curve = ordered_json::array();
  for (const auto& [rho, err] : r.closed_form_curve) curve.push_back({rho, err});
  j["closed_form_curve"] = curve;
  return j;
}

std::string TheoryTable(const theory::TheoryResult& r) {
  std::ostringstream t;
  t << "experiment: " << theory::ToString(r.experiment) << "\n";
  t << "status: " << r.status << "\n";
  for (const auto& note : r.regime_notes) t << "regime: " << note << "\n";
  t << "kappa (d/n):";
  for (double k : r.kappa) t << " " << FormatReal(k);
  t << "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-30s %12s %12s %12s %8s\n", "scheme", "empirical",
                "se", "closed_form", "z");
  t << line;
  for (const auto& s : r.schemes) {
    const double z = s.empirical.se > 0 ? (s.empirical.mean - s.closed_form) / s.empirical.se : 0.0;
    std::snprintf(line, sizeof line, "%-30s %12.6g %12.6g %12.6g %8.3f\n", s.name.c_str(),
                  s.empirical.mean, s.empirical.se, s.closed_form, z);
    t << line;
  }
  if (r.verdict) {
    t << "\nverdict: " << r.verdict->direction << " (scheme2 - scheme1 = "
      << FormatReal(r.verdict->diff) << " +- " << FormatReal(r.verdict->diff_se)
      << ", 95% CI [" << FormatReal(r.verdict->ci95_low) << ", "
      << FormatReal(r.verdict->ci95_high) << "])\n";
  }
  for (const auto& p : r.phat) {
    t << "phat[" << theory::ToString(p.sign) << "]:";
    for (std::size_t k = 0; k < p.phat.size(); ++k) {
      t << " class" << (k + 1) << "=" << FormatReal(p.phat[k])
        << " (-log " << FormatReal(p.uncertainty[k]) << (p.selected[k] ? ", selected" : "")
        << ")";
    }
    t << "\n";
  }
  if (!r.closed_form_curve.empty()) {
    t << "\nclosed-form error over rho:\n";
    for (const auto& [rho, err] : r.closed_form_curve) {
      t << "  rho=" << Fixed("%.3f", rho) << "  err=" << FormatReal(err) << "\n";
    }
  }
  return t.str();
}

}  // namespace

void CmdIngestCheck(const RunConfig& c, OutputSet& out, std::ostream& log) {
  const bool with_annotations = !c.annotation_path.empty();
  Loaded in = LoadInputs(c, out, with_annotations);
  long tokens = 0, mentions = 0, with_logprobs = 0;
  std::set<std::string> objects;
  for (const auto& d : in.captions) {
    tokens += d.length();
    with_logprobs += d.has_logprobs();
    for (const auto& m : ExtractMentions(d, in.vocab)) {
      ++mentions;
      objects.insert(m.canonical);
    }
  }
  ordered_json r;
  r["vocabulary_size"] = in.vocab.size();
  r["captions"] = in.captions.size();
  r["captions_with_logprobs"] = with_logprobs;
  r["tokens"] = tokens;
  r["mentions"] = mentions;
  r["distinct_objects_mentioned"] = objects.size();
  if (with_annotations) {
    std::set<std::string> annotated;
    for (const auto& a : in.annotations) annotated.insert(a.image_id);
    long missing = 0;
    for (const auto& d : in.captions) missing += !annotated.count(d.image_id);
    r["annotations"] = in.annotations.size();
    r["captions_without_annotation"] = missing;
  }
  out.Declare("ingest_report.json");
  out.Write("ingest_report.json", r.dump(2) + "\n");
  log << "ingest-check: " << in.captions.size() << " captions, " << mentions
      << " mentions, vocabulary of " << in.vocab.size() << "\n";
}

void CmdChair(const RunConfig& c, OutputSet& out, std::ostream& log) {
  Loaded in = LoadInputs(c, out, true);
  RequireNonEmpty(in.captions, c.caption_path);
  const auto labeled = LabelCorpus(in.captions, in.annotations, in.vocab, c.workers);
  const ChairReport report = ChairScores(labeled);

  ordered_json j;
  j["method"] = c.method;
  j["chair_s"] = report.chair_s;
  j["chair_i"] = report.chair_i;
  j["total_mentioned_objects"] = report.total_mentioned_objects;
  j["total_hallucinated_objects"] = report.total_hallucinated_objects;
  j["total_captions"] = report.total_captions;
  j["captions_with_hallucination"] = report.captions_with_hallucination;

  const std::string csv = Csv(
      {{"method", "chair_s", "chair_i", "total_mentioned_objects",
        "total_hallucinated_objects", "total_captions", "captions_with_hallucination"},
       {c.method, FormatReal(report.chair_s), FormatReal(report.chair_i),
        std::to_string(report.total_mentioned_objects),
        std::to_string(report.total_hallucinated_objects),
        std::to_string(report.total_captions),
        std::to_string(report.captions_with_hallucination)}});

  const std::string labels = Jsonl(labeled, [](const LabeledDescription& d) {
    ordered_json o;
    o["image_id"] = d.description.image_id;
    ordered_json ms = ordered_json::array();
    for (const auto& m : d.mentions) ms.push_back(MentionJson(m));
    o["mentions"] = ms;
    std::vector<std::string> h, r;
    for (const auto& [obj, label] : d.labels) {
      (label == ObjectLabel::kHallucinated ? h : r).push_back(obj);
    }
    o["hallucinated"] = h;
    o["real"] = r;
    return o;
  });

  for (const char* n : {"chair_report.json", "chair.csv", "labels.jsonl"}) out.Declare(n);
  out.Write("chair_report.json", j.dump(2) + "\n");
  out.Write("chair.csv", csv);
  out.Write("labels.jsonl", labels);
  log << "CHAIR_S=" << FormatReal(report.chair_s) << " CHAIR_I=" << FormatReal(report.chair_i)
      << " over " << report.total_captions << " captions\n";
}

void CmdFactors(const RunConfig& c, OutputSet& out, std::ostream& log) {
  Loaded in = LoadInputs(c, out, true);
  RequireNonEmpty(in.captions, c.caption_path);
  const auto labeled = LabelCorpus(in.captions, in.annotations, in.vocab, c.workers);
  const FactorReport report = AnalyzeFactors(labeled, c.bins, c.policy.eta, c.workers);

  for (const char* n : {"co_scores.jsonl", "po_scores.jsonl", "un_scores.jsonl",
                        "histograms.csv", "factor_report.json"}) {
    out.Declare(n);
  }
  out.Write("co_scores.jsonl", Jsonl(report.co_scores, [](const DescriptionScore& d) {
              return ordered_json{{"image_id", d.image_id},
                                  {"co_score", d.co_score},
                                  {"hallucinatory", d.hallucinatory}};
            }));
  out.Write("po_scores.jsonl", Jsonl(report.mentions, [](const MentionScore& m) {
              return ordered_json{{"image_id", m.image_id},
                                  {"canonical", m.canonical},
                                  {"token_index", m.token_index},
                                  {"hallucinated", m.hallucinated},
                                  {"po_score", m.po_score}};
            }));
  if (report.uncertainty_available) {
    out.Write("un_scores.jsonl", Jsonl(report.mentions, [](const MentionScore& m) {
                return ordered_json{{"image_id", m.image_id},
                                    {"canonical", m.canonical},
                                    {"token_index", m.token_index},
                                    {"hallucinated", m.hallucinated},
                                    {"un_score", Optional(m.un_score)}};
              }));
  } else {
    out.Notice("no token log-probabilities in the caption corpus; uncertainty outputs omitted");
  }

  std::vector<std::vector<std::string>> rows = {
      {"factor", "bin", "lower", "upper", "hallucinated", "real"}};
  AddHistogramRows("co_score", report.co_histogram, rows);
  if (report.un_histogram) AddHistogramRows("un_score", *report.un_histogram, rows);
  AddHistogramRows("po_score", report.po_histogram, rows);
  out.Write("histograms.csv", Csv(rows));

  ordered_json j;
  j["descriptions"] = report.co_scores.size();
  j["mentions"] = report.mentions.size();
  j["uncertainty_available"] = report.uncertainty_available;
  j["eta"] = c.policy.eta;
  j["ratios"] = {{"c_ratio", Optional(report.ratios.c_ratio)},
                 {"u_ratio", Optional(report.ratios.u_ratio)},
                 {"s_ratio", Optional(report.ratios.s_ratio)}};
  j["histograms"]["co_score"] = HistogramJson(report.co_histogram);
  j["histograms"]["un_score"] =
      report.un_histogram ? HistogramJson(*report.un_histogram) : ordered_json();
  j["histograms"]["po_score"] = HistogramJson(report.po_histogram);
  out.Write("factor_report.json", j.dump(2) + "\n");

  auto show = [](const std::optional<double>& v) {
    return v ? FormatReal(*v) : std::string("undefined");
  };
  log << "C_ratio=" << show(report.ratios.c_ratio) << " U_ratio=" << show(report.ratios.u_ratio)
      << " S_ratio=" << show(report.ratios.s_ratio) << "\n";
}

void CmdMask(const RunConfig& c, OutputSet& out, std::ostream& log) {
  Loaded in = LoadInputs(c, out, false);
  std::vector<MaskedDescription> masked =
      ParallelMap(in.captions.size(), c.workers, [&](std::size_t i) {
        MaskedDescription m = MaskDescription(in.captions[i], in.vocab, c.policy);
        CheckRoundTrip(m, in.captions[i].raw_text);
        return m;
      });
  long total = 0;
  for (const auto& m : masked) total += static_cast<long>(m.records.size());
  out.Declare("masked.jsonl");
  out.Write("masked.jsonl", Jsonl(masked, [](const MaskedDescription& m) {
              return ordered_json{{"image_id", m.image_id},
                                  {"masked_text", m.masked_text},
                                  {"placeholder", m.placeholder},
                                  {"records", RecordsJson(m.records)}};
            }));
  log << "masked " << total << " mentions in " << masked.size() << " captions\n";
}

void CmdRevise(const RunConfig& c, OutputSet& out, std::ostream& log) {
  const std::uint64_t seed = RequireSeed(c, "revise");
  Loaded in = LoadInputs(c, out, false);
  std::ostringstream exchange;
  ExchangeLog xlog(&exchange);
  auto backend = MakeBackend(c, seed, &xlog);
  const auto revised =
      ReviseCorpus(in.captions, in.vocab, c.policy, *backend, c.backend.max_in_flight);
  out.Declare("revised.jsonl");
  out.Declare("exchange_log.jsonl");
  out.Write("revised.jsonl", Jsonl(revised, [](const RevisedRecord& r) {
              return ordered_json{{"image_id", r.image_id},
                                  {"masked_text", r.masked.masked_text},
                                  {"records", RecordsJson(r.masked.records)},
                                  {"revised_text", r.revised_text},
                                  {"backend", r.backend_id}};
            }));
  out.WriteLog("exchange_log.jsonl", exchange.str());
  log << "revised " << revised.size() << " captions with backend '" << backend->id() << "'\n";
}

void CmdBuildDataset(const RunConfig& c, OutputSet& out, std::ostream& log) {
  const std::uint64_t seed = RequireSeed(c, "build-dataset");
  RequirePath(c.ground_truth_path, "ground-truth caption file", "--ground-truth");
  Loaded in = LoadInputs(c, out, false);
  const auto ground_truth = LoadCaptionCorpus(c.ground_truth_path);
  out.AddInput("ground_truth", c.ground_truth_path);
  RequireNonEmpty(ground_truth, c.ground_truth_path);

  std::ostringstream exchange;
  ExchangeLog xlog(&exchange);
  auto backend = MakeBackend(c, seed, &xlog);
  DatasetOptions options;
  options.max_in_flight = c.backend.max_in_flight;
  options.max_skip_fraction = c.max_skip_fraction;
  const DatasetResult result =
      BuildTrainingRecords(ground_truth, in.captions, in.vocab, c.policy, *backend, options);
  for (const auto& r : result.records) CheckRoundTrip(r.masked, r.hallucinatory_caption);

  for (const char* n : {"training.jsonl", "skipped.jsonl", "exchange_log.jsonl"}) {
    out.Declare(n);
  }
  out.Write("training.jsonl", Jsonl(result.records, [](const TrainingRecord& r) {
              return ordered_json{{"image_id", r.image_id},
                                  {"co_objects", r.co_objects},
                                  {"uncertain_objects", r.uncertain_objects},
                                  {"hallucinatory_caption", r.hallucinatory_caption},
                                  {"masked_caption", r.masked.masked_text},
                                  {"placeholder", r.masked.placeholder},
                                  {"mask_records", RecordsJson(r.masked.records)},
                                  {"target_caption", r.target_caption}};
            }));
  out.Write("skipped.jsonl", Jsonl(result.skipped, [](const SkippedImage& s) {
              return ordered_json{{"image_id", s.image_id}, {"reason", s.reason}};
            }));
  out.WriteLog("exchange_log.jsonl", exchange.str());
  log << result.records.size() << " training records, " << result.skipped.size()
      << " skipped\n";
}

void CmdTheory(const RunConfig& c, OutputSet& out, std::ostream& log) {
  theory::TheoryConfig tc = c.theory;
  tc.seed = RequireSeed(c, "theory");
  const theory::TheoryResult result = theory::RunExperiment(tc, c.workers);
  out.Declare("theory_result.json");
  out.Declare("theory_table.txt");
  out.Write("theory_result.json", TheoryJson(result, c).dump(2) + "\n");
  const std::string table = TheoryTable(result);
  out.Write("theory_table.txt", table);
  log << table;
}

}  // namespace lure::cli
