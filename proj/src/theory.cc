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

#include "lure/theory.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lure/errors.h"
#include "lure/normal.h"
#include "lure/parallel.h"

namespace lure::theory {
namespace {

namespace k = lure::kernels;

// Stream tags keep every experiment's random numbers disjoint.
enum StreamTag : std::uint64_t {
  kSingleStream = 1,
  kTheorem1Stream = 2,
  kTheorem2Stream = 3,
  kPhatStream = 4,
};

constexpr double kRegimeRatio = 0.1;
constexpr double kKappaLow = 0.1;
constexpr double kKappaHigh = 10.0;

std::vector<int> BalancedLabels(long n) {
  std::vector<int> labels(n, -1);
  std::fill(labels.begin(), labels.begin() + (n + 1) / 2, 1);
  return labels;
}

// Misclassification rate of sign(sum_k <phi_k, beta_k>) over `test_size`
// fresh draws with balanced labels; a score of exactly 0 predicts -1.
double TestError(const std::vector<std::vector<double>>& betas,
                 std::span<const double> mu_norms_sq, long test_size,
                 TestSampling sampling, k::RngState& rng) {
  const long positives = (test_size + 1) / 2;
  long errors = 0;
  if (sampling == TestSampling::kProjected) {
    double center = 0.0, variance = 0.0;
    for (std::size_t c = 0; c < betas.size(); ++c) {
      center += std::sqrt(mu_norms_sq[c]) * betas[c][0];
      variance += k::SquaredNorm(betas[c]);
    }
    const double scale = std::sqrt(variance);
    std::vector<double> z(test_size);
    k::FillGaussian(rng, z);
    for (long i = 0; i < test_size; ++i) {
      const bool positive = i < positives;
      const double score = (positive ? center : -center) + scale * z[i];
      errors += positive ? !(score > 0.0) : (score > 0.0);
    }
  } else {
    const int d = static_cast<int>(betas.front().size());
    std::vector<double> noise(d);
    for (long i = 0; i < test_size; ++i) {
      const double y = i < positives ? 1.0 : -1.0;
      double score = 0.0;
      for (std::size_t c = 0; c < betas.size(); ++c) {
        k::FillGaussian(rng, noise);
        noise[0] += y * std::sqrt(mu_norms_sq[c]);
        score += k::Dot(noise, betas[c]);
      }
      errors += (y > 0.0) ? !(score > 0.0) : (score > 0.0);
    }
  }
  return static_cast<double>(errors) / static_cast<double>(test_size);
}

std::vector<double> Scaled(std::vector<double> v, double factor) {
  for (double& x : v) x *= factor;
  return v;
}

void CheckRegime(TheoryResult& result, const std::vector<long>& sizes) {
  const auto& cfg = result.config;
  for (std::size_t c = 0; c < cfg.mu_norms_sq.size(); ++c) {
    const double ratio = cfg.mu_norms_sq[c] / cfg.d;
    if (ratio > kRegimeRatio) {
      result.outside_regime = true;
      result.regime_notes.push_back("class " + std::to_string(c + 1) +
                                    ": |mu|^2/d = " + std::to_string(ratio) +
                                    " > 0.1");
    }
  }
  for (long n : sizes) {
    const double kappa = n > 0 ? static_cast<double>(cfg.d) / n : INFINITY;
    result.kappa.push_back(kappa);
    if (kappa < kKappaLow || kappa > kKappaHigh) {
      result.outside_regime = true;
      result.regime_notes.push_back("d/n = " + std::to_string(kappa) +
                                    " outside [0.1, 10]");
    }
  }
  result.status = result.outside_regime ? "outside stated regime" : "ok";
}

ClassifierWeights FitBalanced(double mu_norm_sq, int d, long n, k::RngState& rng) {
  if (n == 0) return {std::vector<double>(d, 0.0)};
  const std::vector<int> labels = BalancedLabels(n);
  const long positives = (n + 1) / 2;
  FeatureMatrix features;
  features.rows = n;
  features.cols = d;
  features.data.reserve(static_cast<std::size_t>(n) * d);
  for (int label : {1, -1}) {
    const long count = label > 0 ? positives : n - positives;
    if (count == 0) continue;
    FeatureMatrix part = SampleClassData(mu_norm_sq, d, label, count, rng);
    features.data.insert(features.data.end(), part.data.begin(), part.data.end());
  }
  return FitMeanClassifier(features, labels);
}

}  // namespace

std::string_view ToString(SigmoidSign s) {
  return s == SigmoidSign::kAsProof ? "as_proof" : "standard";
}
std::string_view ToString(TestSampling s) {
  return s == TestSampling::kProjected ? "projected" : "full";
}
std::string_view ToString(Experiment e) {
  switch (e) {
    case Experiment::kSingle: return "single";
    case Experiment::kTheorem1: return "theorem1";
    case Experiment::kTheorem2: return "theorem2";
  }
  return "";
}

SigmoidSign ParseSigmoidSign(std::string_view s) {
  if (s == "as_proof") return SigmoidSign::kAsProof;
  if (s == "standard") return SigmoidSign::kStandard;
  throw ConfigError("sigmoid_sign must be 'as_proof' or 'standard'");
}
TestSampling ParseTestSampling(std::string_view s) {
  if (s == "projected") return TestSampling::kProjected;
  if (s == "full") return TestSampling::kFull;
  throw ConfigError("test_sampling must be 'projected' or 'full'");
}
Experiment ParseExperiment(std::string_view s) {
  if (s == "single") return Experiment::kSingle;
  if (s == "theorem1") return Experiment::kTheorem1;
  if (s == "theorem2") return Experiment::kTheorem2;
  throw ConfigError("experiment must be 'single', 'theorem1' or 'theorem2'");
}

void TheoryConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("theory config: ") + what);
  };
  require(d >= 1, "d must be >= 1");
  require(K >= 1, "K must be >= 1");
  require(N >= 1, "N must be >= 1");
  require(static_cast<int>(mu_norms_sq.size()) == K,
          "mu_norms_sq needs one entry per class");
  for (double m : mu_norms_sq) {
    require(std::isfinite(m) && m >= 0.0, "mu_norms_sq entries must be finite and >= 0");
  }
  require(rho0 > 0.0 && rho0 < 1.0, "rho0 must lie in (0, 1)");
  require(rho > 0.0 && rho <= rho0, "rho must lie in (0, rho0]");
  require(std::isfinite(gamma_u) && gamma_u >= 0.0, "gamma_u must be finite and >= 0");
  require(trials >= 1, "trials must be >= 1");
  require(test_size >= 2, "test_size must be >= 2");
  require(selected_share > 0.0 && selected_share < 1.0,
          "selected_share must lie in (0, 1)");
  require(phat_samples >= 1, "phat_samples must be >= 1");
  if (experiment == Experiment::kTheorem1) require(K == 2, "theorem1 needs K = 2");
  if (experiment == Experiment::kTheorem2) require(K >= 2, "theorem2 needs K >= 2");
}

FeatureMatrix SampleClassData(double mu_norm_sq, int d, int label, long count,
                              k::RngState& rng) {
  if (count < 1) throw PreconditionError("sample count must be >= 1");
  FeatureMatrix m;
  m.rows = count;
  m.cols = d;
  m.data.resize(static_cast<std::size_t>(count) * d);
  k::FillGaussian(rng, m.data);
  const double shift = label * std::sqrt(mu_norm_sq);
  for (long i = 0; i < count; ++i) m.row(i)[0] += shift;
  return m;
}

std::vector<double> LabelWeightedSum(const FeatureMatrix& features,
                                     std::span<const int> labels) {
  if (static_cast<long>(labels.size()) != features.rows) {
    throw PreconditionError("label count does not match feature rows");
  }
  std::vector<double> sum(features.cols, 0.0);
  for (long i = 0; i < features.rows; ++i) {
    k::Axpy(static_cast<double>(labels[i]), features.row(i), sum);
  }
  return sum;
}

ClassifierWeights FitMeanClassifier(const FeatureMatrix& features,
                                    std::span<const int> labels) {
  if (features.rows < 1) throw PreconditionError("mean classifier needs a sample");
  return {Scaled(LabelWeightedSum(features, labels),
                 1.0 / static_cast<double>(features.rows))};
}

double ClosedFormErrorSingle(double mu_norm_sq, int d, long n) {
  if (n < 1 || d < 1) throw PreconditionError("closed form needs n, d >= 1");
  return NormalCdf(-mu_norm_sq / std::sqrt(mu_norm_sq + static_cast<double>(d) / n));
}

double ClosedFormErrorCooccur(double rho, double mu1_sq, double mu2_sq, int d,
                              long N) {
  if (!(rho > 0.0 && rho <= 1.0)) throw PreconditionError("rho must lie in (0, 1]");
  const double noise = rho * d / static_cast<double>(N);
  const double numerator = rho * mu1_sq + rho * mu2_sq;
  const double denominator =
      std::sqrt(rho * rho * mu1_sq + rho * rho * mu2_sq + noise + noise);
  return NormalCdf(-numerator / denominator);
}

double EstimatePhat(double mu_norm_sq, long n, k::RngState& rng, SigmoidSign sign) {
  if (n < 1) throw PreconditionError("phat needs n >= 1");
  std::vector<double> z(n);
  k::FillGaussian(rng, z);
  const double mu = std::sqrt(mu_norm_sq);
  const double direction = sign == SigmoidSign::kAsProof ? 1.0 : -1.0;
  double sum = 0.0;
  for (double zi : z) sum += 1.0 / (1.0 + std::exp(direction * (mu_norm_sq + mu * zi)));
  return sum / static_cast<double>(n);
}

ErrorEstimate Summarize(std::span<const double> per_trial) {
  ErrorEstimate e;
  e.trials = static_cast<int>(per_trial.size());
  if (per_trial.empty()) return e;
  e.mean = std::accumulate(per_trial.begin(), per_trial.end(), 0.0) / e.trials;
  if (e.trials > 1) {
    double ss = 0.0;
    for (double v : per_trial) ss += (v - e.mean) * (v - e.mean);
    e.se = std::sqrt(ss / (e.trials - 1)) / std::sqrt(static_cast<double>(e.trials));
  }
  return e;
}

Verdict CompareSchemes(const ErrorEstimate& scheme1, const ErrorEstimate& scheme2) {
  Verdict v;
  v.diff = scheme2.mean - scheme1.mean;
  v.diff_se = std::hypot(scheme1.se, scheme2.se);
  v.ci95_low = v.diff - 1.96 * v.diff_se;
  v.ci95_high = v.diff + 1.96 * v.diff_se;
  if (std::abs(v.diff) <= 3.0 * v.diff_se) {
    v.direction = "indistinguishable";
  } else {
    v.direction = v.diff < 0.0 ? "scheme2_lower" : "scheme1_lower";
  }
  return v;
}

std::vector<long> EqualAllocation(int classes, long total) {
  std::vector<long> n(classes, total / classes);
  for (long r = 0; r < total % classes; ++r) ++n[r];
  return n;
}

std::vector<long> FilteredAllocation(const std::vector<bool>& selected, long total,
                                     double selected_share) {
  const long chosen = std::count(selected.begin(), selected.end(), true);
  if (chosen == 0) {
    throw ConfigError("uncertainty filter selected no class; lower gamma_u");
  }
  const int classes = static_cast<int>(selected.size());
  if (chosen == classes) return EqualAllocation(classes, total);
  const long to_selected = std::llround(selected_share * static_cast<double>(total));
  const auto share_selected = EqualAllocation(static_cast<int>(chosen), to_selected);
  const auto share_rest =
      EqualAllocation(classes - static_cast<int>(chosen), total - to_selected);
  std::vector<long> n(classes);
  std::size_t a = 0, b = 0;
  for (int c = 0; c < classes; ++c) n[c] = selected[c] ? share_selected[a++] : share_rest[b++];
  return n;
}

TheoryResult RunSingleClassExperiment(const TheoryConfig& config, int workers) {
  config.Validate();
  TheoryResult result;
  result.experiment = Experiment::kSingle;
  result.config = config;
  const double mu = config.mu_norms_sq.front();
  const std::vector<double> mus = {mu};

  const auto per_trial = ParallelMap(config.trials, workers, [&](std::size_t t) {
    auto rng = k::SeedRng(k::StreamKey(config.seed, kSingleStream, 0, t));
    const ClassifierWeights w = FitBalanced(mu, config.d, config.N, rng);
    return TestError({w.beta}, mus, config.test_size, config.test_sampling, rng);
  });

  SchemeResult s;
  s.name = "single";
  s.allocation = {config.N};
  s.empirical = Summarize(per_trial);
  s.closed_form = ClosedFormErrorSingle(mu, config.d, config.N);
  s.per_class_empirical = {s.empirical};
  s.per_class_closed_form = {s.closed_form};
  result.schemes.push_back(std::move(s));
  TheoryConfig regime = config;
  regime.mu_norms_sq = mus;
  result.config = regime;
  CheckRegime(result, {config.N});
  result.config = config;
  return result;
}

TheoryResult RunTheorem1Experiment(const TheoryConfig& config, int workers) {
  config.Validate();
  TheoryResult result;
  result.experiment = Experiment::kTheorem1;
  result.config = config;
  const double mu1 = config.mu_norms_sq[0];
  const double mu2 = config.mu_norms_sq[1];

  const double fractions[2] = {config.rho0, config.rho};
  const char* names[2] = {"scheme1_rho0", "scheme2_rho"};
  std::vector<ErrorEstimate> estimates;
  for (int scheme = 0; scheme < 2; ++scheme) {
    const double rho = fractions[scheme];
    // Only the jointly positive fraction of the N samples is observed; the
    // rest contribute zero feature vectors to the estimator's sum.
    const long observed = std::llround(rho * static_cast<double>(config.N));
    const auto per_trial = ParallelMap(config.trials, workers, [&](std::size_t t) {
      auto rng = k::SeedRng(k::StreamKey(config.seed, kTheorem1Stream, scheme, t));
      std::vector<std::vector<double>> betas;
      for (double mu : {mu1, mu2}) {
        if (observed == 0) {
          betas.emplace_back(config.d, 0.0);
          continue;
        }
        const FeatureMatrix phi = SampleClassData(mu, config.d, 1, observed, rng);
        const std::vector<int> labels(observed, 1);
        betas.push_back(Scaled(LabelWeightedSum(phi, labels),
                               1.0 / static_cast<double>(config.N)));
      }
      return TestError(betas, config.mu_norms_sq, config.test_size,
                       config.test_sampling, rng);
    });
    SchemeResult s;
    s.name = names[scheme];
    s.rho = rho;
    s.allocation = {config.N};
    s.empirical = Summarize(per_trial);
    s.closed_form = ClosedFormErrorCooccur(rho, mu1, mu2, config.d, config.N);
    estimates.push_back(s.empirical);
    result.schemes.push_back(std::move(s));
  }
  result.verdict = CompareSchemes(estimates[0], estimates[1]);
  constexpr int kGrid = 10;
  for (int i = 1; i <= kGrid; ++i) {
    const double rho = config.rho0 * i / kGrid;
    result.closed_form_curve.emplace_back(
        rho, ClosedFormErrorCooccur(rho, mu1, mu2, config.d, config.N));
  }
  CheckRegime(result, {config.N});
  return result;
}

TheoryResult RunTheorem2Experiment(const TheoryConfig& config, int workers) {
  config.Validate();
  TheoryResult result;
  result.experiment = Experiment::kTheorem2;
  result.config = config;
  const int classes = config.K;

  std::vector<bool> selected;
  for (SigmoidSign sign : {SigmoidSign::kAsProof, SigmoidSign::kStandard}) {
    PhatReport report;
    report.sign = sign;
    for (int c = 0; c < classes; ++c) {
      auto rng = k::SeedRng(k::StreamKey(config.seed, kPhatStream,
                                         static_cast<std::uint64_t>(sign), c));
      const double p = EstimatePhat(config.mu_norms_sq[c], config.phat_samples, rng, sign);
      report.phat.push_back(p);
      report.uncertainty.push_back(-std::log(p));
      report.selected.push_back(-std::log(p) > config.gamma_u);
    }
    if (sign == config.sigmoid_sign) selected = report.selected;
    result.phat.push_back(std::move(report));
  }

  const std::vector<long> allocations[2] = {
      EqualAllocation(classes, config.N),
      FilteredAllocation(selected, config.N, config.selected_share)};
  const char* names[2] = {"scheme1_equal", "scheme2_uncertainty_filtered"};
  std::vector<ErrorEstimate> estimates;
  std::vector<long> all_sizes;
  for (int scheme = 0; scheme < 2; ++scheme) {
    const auto& n = allocations[scheme];
    const auto per_trial = ParallelMap(config.trials, workers, [&](std::size_t t) {
      auto rng = k::SeedRng(k::StreamKey(config.seed, kTheorem2Stream, scheme, t));
      std::vector<double> errors(classes);
      for (int c = 0; c < classes; ++c) {
        const ClassifierWeights w = FitBalanced(config.mu_norms_sq[c], config.d, n[c], rng);
        const double mu[1] = {config.mu_norms_sq[c]};
        errors[c] = TestError({w.beta}, mu, config.test_size, config.test_sampling, rng);
      }
      return errors;
    });

    SchemeResult s;
    s.name = names[scheme];
    s.allocation = n;
    std::vector<double> averaged;
    for (const auto& e : per_trial) {
      averaged.push_back(std::accumulate(e.begin(), e.end(), 0.0) / classes);
    }
    s.empirical = Summarize(averaged);
    double closed = 0.0;
    for (int c = 0; c < classes; ++c) {
      std::vector<double> column;
      for (const auto& e : per_trial) column.push_back(e[c]);
      s.per_class_empirical.push_back(Summarize(column));
      const double cf = n[c] > 0 ? ClosedFormErrorSingle(config.mu_norms_sq[c], config.d, n[c])
                                 : 0.5;
      s.per_class_closed_form.push_back(cf);
      closed += cf;
      all_sizes.push_back(n[c]);
    }
    s.closed_form = closed / classes;
    estimates.push_back(s.empirical);
    result.schemes.push_back(std::move(s));
  }
  result.verdict = CompareSchemes(estimates[0], estimates[1]);
  CheckRegime(result, all_sizes);
  return result;
}

TheoryResult RunExperiment(const TheoryConfig& config, int workers) {
  switch (config.experiment) {
    case Experiment::kSingle: return RunSingleClassExperiment(config, workers);
    case Experiment::kTheorem1: return RunTheorem1Experiment(config, workers);
    case Experiment::kTheorem2: return RunTheorem2Experiment(config, workers);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace lure::theory
