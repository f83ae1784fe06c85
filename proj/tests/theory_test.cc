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

#include <cmath>
#include <limits>
#include <numeric>

#include <gtest/gtest.h>

#include "lure/errors.h"
#include "lure/normal.h"
#include "lure/theory.h"
#include "oracles.h"

namespace lure::theory {
namespace {

using lure::testing::NormalCdfOracle;
using lure::testing::PhatOracle;

double SingleOracle(double mu, int d, long n) {
  const long double arg = -static_cast<long double>(mu) /
                          std::sqrt(static_cast<long double>(mu) + static_cast<long double>(d) / n);
  return NormalCdfOracle(static_cast<double>(arg));
}

double CooccurOracle(double rho, double m1, double m2, int d, long N) {
  const long double r = rho;
  const long double num = r * (static_cast<long double>(m1) + m2);
  const long double den = std::sqrt(r * r * (static_cast<long double>(m1) + m2) +
                                    2.0L * r * d / static_cast<long double>(N));
  return NormalCdfOracle(static_cast<double>(-num / den));
}

TheoryConfig Small(Experiment e) {
  TheoryConfig c;
  c.experiment = e;
  c.d = 200;
  c.N = 200;
  c.trials = 60;
  c.test_size = 4000;
  c.seed = 17;
  c.phat_samples = 20000;
  if (e == Experiment::kSingle) c.mu_norms_sq = {4.0};
  if (e == Experiment::kSingle) c.K = 1;
  return c;
}

TEST(NormalCdf, MatchesExtendedPrecision) {
  for (double x : {-38.0, -20.0, -8.5, -3.0, -1.0, -1e-3, 0.0, 0.5, 2.0, 6.0}) {
    const double want = NormalCdfOracle(x);
    EXPECT_NEAR(NormalCdf(x), want, 4 * std::numeric_limits<double>::epsilon() * want) << x;
  }
  EXPECT_EQ(NormalCdf(0.0), 0.5);
}

TEST(ClosedForm, ReferenceValues) {
  EXPECT_NEAR(ClosedFormErrorSingle(10, 1000, 500), 0.001946208561389315, 1e-17);
  EXPECT_NEAR(ClosedFormErrorCooccur(0.8, 5, 5, 1000, 500), 0.004911637253759627, 1e-17);
  EXPECT_NEAR(ClosedFormErrorCooccur(0.2, 5, 5, 1000, 500), 0.033944577430914522, 1e-16);
  const double equal = (ClosedFormErrorSingle(1, 1000, 500) + ClosedFormErrorSingle(25, 1000, 500)) / 2;
  const double filtered =
      (ClosedFormErrorSingle(1, 1000, 750) + ClosedFormErrorSingle(25, 1000, 250)) / 2;
  EXPECT_NEAR(equal, 0.14092609038164173, 1e-15);
  EXPECT_NEAR(filtered, 0.12817355109777001, 1e-15);
  EXPECT_LT(filtered, equal);
}

TEST(ClosedForm, AgreesWithOracleOverGrid) {
  for (double mu : {0.1, 1.0, 5.0, 25.0, 100.0}) {
    for (int d : {10, 1000, 5000}) {
      for (long n : {10L, 500L, 20000L}) {
        const double want = SingleOracle(mu, d, n);
        EXPECT_NEAR(ClosedFormErrorSingle(mu, d, n), want, 1e-13 * want) << mu << " " << d;
      }
    }
  }
  for (double rho : {0.05, 0.2, 0.5, 0.8, 1.0}) {
    const double want = CooccurOracle(rho, 5, 3, 1000, 500);
    EXPECT_NEAR(ClosedFormErrorCooccur(rho, 5, 3, 1000, 500), want, 1e-13 * want);
  }
}

TEST(ClosedForm, Monotonicity) {
  for (int i = 1; i < 20; ++i) {
    EXPECT_LT(ClosedFormErrorSingle(i + 1.0, 1000, 500), ClosedFormErrorSingle(i, 1000, 500));
    EXPECT_LT(ClosedFormErrorSingle(5, 1000, 100 * (i + 1)), ClosedFormErrorSingle(5, 1000, 100 * i));
    EXPECT_GT(ClosedFormErrorSingle(5, 100 * (i + 1), 500), ClosedFormErrorSingle(5, 100 * i, 500));
    EXPECT_LT(ClosedFormErrorCooccur(0.05 * (i + 1), 5, 5, 1000, 500),
              ClosedFormErrorCooccur(0.05 * i, 5, 5, 1000, 500));
  }
  EXPECT_EQ(ClosedFormErrorSingle(0, 1000, 500), 0.5);
  EXPECT_THROW(ClosedFormErrorSingle(5, 1000, 0), PreconditionError);
  EXPECT_THROW(ClosedFormErrorCooccur(0.0, 5, 5, 1000, 500), PreconditionError);
}

TEST(Phat, MatchesQuadratureOracle) {
  for (double mu : {0.25, 1.0, 4.0, 25.0}) {
    for (SigmoidSign sign : {SigmoidSign::kAsProof, SigmoidSign::kStandard}) {
      auto rng = kernels::SeedRng(static_cast<std::uint64_t>(mu * 100));
      const long n = 200000;
      const double got = EstimatePhat(mu, n, rng, sign);
      const double want = PhatOracle(mu, sign == SigmoidSign::kAsProof);
      EXPECT_NEAR(got, want, 5 * 0.5 / std::sqrt(static_cast<double>(n)))
          << mu << " " << ToString(sign);
    }
  }
}

TEST(Phat, ZeroMeanIsOneHalfUnderEitherSign) {
  for (SigmoidSign sign : {SigmoidSign::kAsProof, SigmoidSign::kStandard}) {
    auto rng = kernels::SeedRng(1);
    EXPECT_NEAR(EstimatePhat(0.0, 1000, rng, sign), 0.5, 0.01);
    EXPECT_NEAR(PhatOracle(0.0, sign == SigmoidSign::kAsProof), 0.5, 1e-12);
  }
}

TEST(Phat, SignsAreComplementary) {
  for (double mu : {0.5, 2.0, 9.0}) {
    EXPECT_NEAR(PhatOracle(mu, true) + PhatOracle(mu, false), 1.0, 1e-12);
  }
}

TEST(SampleClassData, MeanShiftOnFirstCoordinate) {
  auto rng = kernels::SeedRng(8);
  const auto m = SampleClassData(9.0, 5, -1, 40000, rng);
  ASSERT_EQ(m.rows, 40000);
  ASSERT_EQ(m.cols, 5);
  for (int j = 0; j < 5; ++j) {
    double mean = 0, sq = 0;
    for (long i = 0; i < m.rows; ++i) mean += m.row(i)[j];
    mean /= m.rows;
    for (long i = 0; i < m.rows; ++i) sq += std::pow(m.row(i)[j] - mean, 2);
    const double se = 1.0 / std::sqrt(static_cast<double>(m.rows));
    EXPECT_NEAR(mean, j == 0 ? -3.0 : 0.0, 5 * se) << j;
    EXPECT_NEAR(sq / (m.rows - 1), 1.0, 5 * std::sqrt(2.0) * se) << j;
  }
  EXPECT_THROW(SampleClassData(1.0, 5, 1, 0, rng), PreconditionError);
}

TEST(MeanClassifier, MatchesNaiveLoop) {
  auto rng = kernels::SeedRng(2);
  const auto m = SampleClassData(1.0, 7, 1, 13, rng);
  std::vector<int> labels(13);
  for (int i = 0; i < 13; ++i) labels[i] = i % 3 == 0 ? -1 : 1;
  const auto sum = LabelWeightedSum(m, labels);
  const auto fit = FitMeanClassifier(m, labels);
  for (int j = 0; j < 7; ++j) {
    double want = 0;
    for (int i = 0; i < 13; ++i) want += labels[i] * m.row(i)[j];
    EXPECT_NEAR(sum[j], want, 1e-12);
    EXPECT_NEAR(fit.beta[j], want / 13, 1e-13);
  }
  EXPECT_THROW(LabelWeightedSum(m, std::vector<int>(3, 1)), PreconditionError);
}

TEST(Summarize, SampleStandardError) {
  const std::vector<double> v = {1, 2, 3, 4};
  const auto e = Summarize(v);
  EXPECT_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.se, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(e.trials, 4);
  EXPECT_EQ(Summarize(std::vector<double>{7}).se, 0.0);
}

TEST(CompareSchemes, Verdicts) {
  EXPECT_EQ(CompareSchemes({0.10, 0.01, 50}, {0.05, 0.01, 50}).direction, "scheme2_lower");
  EXPECT_EQ(CompareSchemes({0.05, 0.01, 50}, {0.10, 0.01, 50}).direction, "scheme1_lower");
  EXPECT_EQ(CompareSchemes({0.10, 0.01, 50}, {0.08, 0.01, 50}).direction, "indistinguishable");
  const auto v = CompareSchemes({0.3, 0.03, 9}, {0.2, 0.04, 9});
  EXPECT_NEAR(v.diff, -0.1, 1e-15);
  EXPECT_NEAR(v.diff_se, 0.05, 1e-15);
  EXPECT_NEAR(v.ci95_low, -0.198, 1e-12);
  EXPECT_NEAR(v.ci95_high, -0.002, 1e-12);
}

TEST(Allocation, EqualAndFiltered) {
  EXPECT_EQ(EqualAllocation(3, 10), (std::vector<long>{4, 3, 3}));
  EXPECT_EQ(FilteredAllocation({true, false}, 1000, 0.75), (std::vector<long>{750, 250}));
  EXPECT_EQ(FilteredAllocation({false, true}, 1000, 0.75), (std::vector<long>{250, 750}));
  EXPECT_EQ(FilteredAllocation({true, true, false}, 1000, 0.75),
            (std::vector<long>{375, 375, 250}));
  EXPECT_EQ(FilteredAllocation({true, true}, 1001, 0.75), (std::vector<long>{501, 500}));
  EXPECT_THROW(FilteredAllocation({false, false}, 1000, 0.75), ConfigError);
  for (const auto& a : {FilteredAllocation({true, false, false}, 997, 0.6),
                        FilteredAllocation({false, true, true, false}, 10, 0.3)}) {
    EXPECT_EQ(std::accumulate(a.begin(), a.end(), 0L), a.size() == 3 ? 997L : 10L);
  }
}

TEST(TheoryConfig, Validation) {
  auto bad = [](auto mutate) {
    TheoryConfig c;
    mutate(c);
    EXPECT_THROW(c.Validate(), ConfigError);
  };
  TheoryConfig ok;
  EXPECT_NO_THROW(ok.Validate());
  bad([](TheoryConfig& c) { c.d = 0; });
  bad([](TheoryConfig& c) { c.N = 0; });
  bad([](TheoryConfig& c) { c.mu_norms_sq = {1.0}; });
  bad([](TheoryConfig& c) { c.mu_norms_sq = {1.0, -2.0}; });
  bad([](TheoryConfig& c) { c.rho0 = 1.0; });
  bad([](TheoryConfig& c) { c.rho = 0.9; });
  bad([](TheoryConfig& c) { c.rho = 0.0; });
  bad([](TheoryConfig& c) { c.trials = 0; });
  bad([](TheoryConfig& c) { c.test_size = 1; });
  bad([](TheoryConfig& c) { c.selected_share = 1.0; });
  bad([](TheoryConfig& c) {
    c.K = 3;
    c.mu_norms_sq = {1, 2, 3};
  });
  EXPECT_THROW(ParseExperiment("theorem3"), ConfigError);
  EXPECT_EQ(ParseSigmoidSign(ToString(SigmoidSign::kAsProof)), SigmoidSign::kAsProof);
  EXPECT_EQ(ParseTestSampling(ToString(TestSampling::kFull)), TestSampling::kFull);
}

TEST(Experiments, SingleClassMatchesClosedForm) {
  const auto r = RunSingleClassExperiment(Small(Experiment::kSingle));
  const auto& s = r.schemes.at(0);
  EXPECT_EQ(s.closed_form, ClosedFormErrorSingle(4.0, 200, 200));
  EXPECT_LE(std::abs(s.empirical.mean - s.closed_form), 3 * s.empirical.se);
  EXPECT_EQ(r.status, "ok");
}

TEST(Experiments, FullTestSamplingAgreesWithProjected) {
  auto c = Small(Experiment::kSingle);
  c.d = 50;
  c.N = 50;
  c.mu_norms_sq = {2.0};
  c.test_size = 1000;
  c.trials = 40;
  const auto projected = RunSingleClassExperiment(c).schemes[0].empirical;
  c.test_sampling = TestSampling::kFull;
  const auto full = RunSingleClassExperiment(c).schemes[0].empirical;
  EXPECT_LE(std::abs(projected.mean - full.mean), 3 * std::hypot(projected.se, full.se));
}

TEST(Experiments, WorkerCountDoesNotChangeResults) {
  for (Experiment e : {Experiment::kSingle, Experiment::kTheorem1, Experiment::kTheorem2}) {
    auto c = Small(e);
    c.trials = 12;
    c.test_size = 500;
    if (e == Experiment::kTheorem2) c.mu_norms_sq = {1.0, 25.0};
    const auto a = RunExperiment(c, 1);
    const auto b = RunExperiment(c, 4);
    ASSERT_EQ(a.schemes.size(), b.schemes.size());
    for (std::size_t i = 0; i < a.schemes.size(); ++i) {
      EXPECT_EQ(a.schemes[i].empirical.mean, b.schemes[i].empirical.mean);
      EXPECT_EQ(a.schemes[i].empirical.se, b.schemes[i].empirical.se);
    }
  }
}

TEST(Experiments, SeedChangesDraws) {
  auto c = Small(Experiment::kSingle);
  c.trials = 10;
  const double a = RunSingleClassExperiment(c).schemes[0].empirical.mean;
  c.seed = 18;
  EXPECT_NE(RunSingleClassExperiment(c).schemes[0].empirical.mean, a);
}

TEST(Experiments, StandardErrorHalvesWhenTrialsQuadruple) {
  auto c = Small(Experiment::kSingle);
  c.test_size = 1000;
  c.trials = 50;
  const double se50 = RunSingleClassExperiment(c).schemes[0].empirical.se;
  c.trials = 200;
  const double se200 = RunSingleClassExperiment(c).schemes[0].empirical.se;
  EXPECT_GT(se200 / se50, 0.35);
  EXPECT_LT(se200 / se50, 0.7);
}

TEST(Experiments, Theorem1SchemesMatchClosedForms) {
  auto c = Small(Experiment::kTheorem1);
  c.mu_norms_sq = {3.0, 3.0};
  const auto r = RunTheorem1Experiment(c);
  ASSERT_EQ(r.schemes.size(), 2u);
  EXPECT_EQ(*r.schemes[0].rho, 0.8);
  EXPECT_EQ(*r.schemes[1].rho, 0.2);
  for (const auto& s : r.schemes) {
    EXPECT_LE(std::abs(s.empirical.mean - s.closed_form), 3 * s.empirical.se) << s.name;
  }
  ASSERT_TRUE(r.verdict);
  EXPECT_EQ(r.verdict->direction, "scheme1_lower");
  ASSERT_EQ(r.closed_form_curve.size(), 10u);
  EXPECT_NEAR(r.closed_form_curve.back().first, 0.8, 1e-15);
  for (std::size_t i = 1; i < r.closed_form_curve.size(); ++i) {
    EXPECT_LT(r.closed_form_curve[i].second, r.closed_form_curve[i - 1].second);
  }
}

TEST(Experiments, Theorem1ControlIsIndistinguishable) {
  auto c = Small(Experiment::kTheorem1);
  c.rho = c.rho0;
  const auto r = RunTheorem1Experiment(c);
  EXPECT_EQ(r.verdict->direction, "indistinguishable");
  EXPECT_EQ(r.schemes[0].closed_form, r.schemes[1].closed_form);
}

TEST(Experiments, Theorem2AllocationsAndPhatReport) {
  auto c = Small(Experiment::kTheorem2);
  c.mu_norms_sq = {1.0, 25.0};
  c.N = 400;
  const auto r = RunTheorem2Experiment(c);
  ASSERT_EQ(r.phat.size(), 2u);
  EXPECT_EQ(r.phat[0].sign, SigmoidSign::kAsProof);
  EXPECT_EQ(r.phat[1].sign, SigmoidSign::kStandard);
  // Standard sign: the weak class is the uncertain one.
  EXPECT_EQ(r.phat[1].selected, (std::vector<bool>{true, false}));
  EXPECT_EQ(r.schemes[0].allocation, (std::vector<long>{200, 200}));
  EXPECT_EQ(r.schemes[1].allocation, (std::vector<long>{300, 100}));
  for (const auto& s : r.schemes) {
    EXPECT_LE(std::abs(s.empirical.mean - s.closed_form), 3 * s.empirical.se) << s.name;
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_EQ(s.per_class_closed_form[k],
                ClosedFormErrorSingle(c.mu_norms_sq[k], c.d, s.allocation[k]));
    }
  }
  for (const auto& report : r.phat) {
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_NEAR(report.uncertainty[k], -std::log(report.phat[k]), 1e-15);
    }
  }
}

TEST(Experiments, RegimeFlags) {
  auto c = Small(Experiment::kSingle);
  c.trials = 3;
  c.test_size = 100;
  c.mu_norms_sq = {50.0};  // 50/200 > 0.1
  auto r = RunSingleClassExperiment(c);
  EXPECT_TRUE(r.outside_regime);
  EXPECT_EQ(r.status, "outside stated regime");
  c.mu_norms_sq = {4.0};
  c.N = 10;  // d/n = 20
  r = RunSingleClassExperiment(c);
  EXPECT_TRUE(r.outside_regime);
  EXPECT_EQ(r.kappa.at(0), 20.0);
  c.N = 200;
  EXPECT_FALSE(RunSingleClassExperiment(c).outside_regime);
}

}  // namespace
}  // namespace lure::theory
