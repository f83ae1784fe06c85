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

// Monte Carlo lab for the Gaussian object-prediction model: class features
// phi_k | y ~ N(y * mu_k, I_d), mean-estimator classifiers, and the
// closed-form misclassification errors they are compared against.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lure/kernels/kernels.h"

namespace lure::theory {

enum class SigmoidSign {
  kAsProof,   // E[1 / (1 + exp(+margin))]
  kStandard,  // E[sigma(margin)] = E[1 / (1 + exp(-margin))]
};

enum class TestSampling {
  kProjected,  // draw <phi, beta> from its exact 1-D law given beta
  kFull,       // draw d-dimensional test features
};

enum class Experiment { kSingle, kTheorem1, kTheorem2 };

std::string_view ToString(SigmoidSign s);
std::string_view ToString(TestSampling s);
std::string_view ToString(Experiment e);
SigmoidSign ParseSigmoidSign(std::string_view s);
TestSampling ParseTestSampling(std::string_view s);
Experiment ParseExperiment(std::string_view s);

struct TheoryConfig {
  Experiment experiment = Experiment::kTheorem1;
  int d = 1000;
  int K = 2;
  long N = 500;  // per-scheme training size (per class for kSingle)
  std::vector<double> mu_norms_sq = {5.0, 5.0};
  double rho0 = 0.8;
  double rho = 0.2;
  double gamma_u = 0.1;
  int trials = 200;
  long test_size = 10000;
  std::uint64_t seed = 0;
  SigmoidSign sigmoid_sign = SigmoidSign::kStandard;
  // Uncertainty-filtered scheme: share of N given to the classes above gamma_u.
  double selected_share = 0.75;
  long phat_samples = 100000;
  TestSampling test_sampling = TestSampling::kProjected;

  // Throws ConfigError on any out-of-range field.
  void Validate() const;
};

// Row-major count x d.
struct FeatureMatrix {
  long rows = 0;
  int cols = 0;
  std::vector<double> data;

  std::span<const double> row(long i) const {
    return {data.data() + i * cols, static_cast<std::size_t>(cols)};
  }
  std::span<double> row(long i) {
    return {data.data() + i * cols, static_cast<std::size_t>(cols)};
  }
};

struct ClassifierWeights {
  std::vector<double> beta;
};

// Rows drawn from N(label * mu, I_d) with mu = (sqrt(mu_norm_sq), 0, ..., 0).
FeatureMatrix SampleClassData(double mu_norm_sq, int d, int label, long count,
                              kernels::RngState& rng);

// sum_i label_i * phi_i (no normalization).
std::vector<double> LabelWeightedSum(const FeatureMatrix& features,
                                     std::span<const int> labels);

// beta = (1/|D|) sum_i label_i * phi_i.
ClassifierWeights FitMeanClassifier(const FeatureMatrix& features,
                                    std::span<const int> labels);

// Phi(-|mu|^2 / sqrt(|mu|^2 + d/n)).
double ClosedFormErrorSingle(double mu_norm_sq, int d, long n);

// Phi(-(rho|mu1|^2 + rho|mu2|^2) /
//     sqrt(rho^2|mu1|^2 + rho^2|mu2|^2 + rho d/N + rho d/N)).
double ClosedFormErrorCooccur(double rho, double mu1_sq, double mu2_sq, int d,
                              long N);

// Monte Carlo estimate of E[1/(1+exp(-+(|mu|^2 + |mu| Z)))] from n draws.
double EstimatePhat(double mu_norm_sq, long n, kernels::RngState& rng,
                    SigmoidSign sign);

struct ErrorEstimate {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean over trials
  int trials = 0;
};

ErrorEstimate Summarize(std::span<const double> per_trial);

struct SchemeResult {
  std::string name;
  std::optional<double> rho;               // theorem 1
  std::vector<long> allocation;            // per-class training sizes
  ErrorEstimate empirical;                 // class-averaged for theorem 2
  double closed_form = 0.0;
  std::vector<ErrorEstimate> per_class_empirical;
  std::vector<double> per_class_closed_form;
};

struct Verdict {
  // "scheme2_lower", "scheme1_lower" or "indistinguishable" (|diff| <= 3 se).
  std::string direction;
  double diff = 0.0;  // scheme 2 minus scheme 1
  double diff_se = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
};

struct PhatReport {
  SigmoidSign sign = SigmoidSign::kStandard;
  std::vector<double> phat;
  std::vector<double> uncertainty;  // -log phat
  std::vector<bool> selected;       // uncertainty > gamma_u
};

struct TheoryResult {
  Experiment experiment = Experiment::kTheorem1;
  TheoryConfig config;
  std::vector<double> kappa;  // d / n per scheme
  bool outside_regime = false;
  std::vector<std::string> regime_notes;
  std::string status;  // "ok" or "outside stated regime"
  std::vector<SchemeResult> schemes;
  std::optional<Verdict> verdict;
  std::vector<PhatReport> phat;                             // theorem 2
  std::vector<std::pair<double, double>> closed_form_curve;  // (rho, err)
};

Verdict CompareSchemes(const ErrorEstimate& scheme1, const ErrorEstimate& scheme2);

TheoryResult RunSingleClassExperiment(const TheoryConfig& config, int workers = 1);
TheoryResult RunTheorem1Experiment(const TheoryConfig& config, int workers = 1);
TheoryResult RunTheorem2Experiment(const TheoryConfig& config, int workers = 1);
TheoryResult RunExperiment(const TheoryConfig& config, int workers = 1);

// Training sizes for theorem 2's uncertainty-filtered scheme given which
// classes were selected. Throws ConfigError if none were.
std::vector<long> FilteredAllocation(const std::vector<bool>& selected, long total,
                                     double selected_share);
std::vector<long> EqualAllocation(int classes, long total);

}  // namespace lure::theory
