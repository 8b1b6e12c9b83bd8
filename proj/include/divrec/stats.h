// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIVREC_STATS_H_
#define DIVREC_STATS_H_

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace divrec::stats {

class StatsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Distributions. The incomplete beta is evaluated by Lentz's continued
// fraction; accuracy is around 1e-14 relative for moderate parameters.

double RegularizedIncompleteBeta(double a, double b, double x);
// Two-sided p-value of a t statistic with `dof` (fractional) degrees of freedom.
double StudentTTwoSidedP(double t, double dof);
// Upper tail P(F > f) with (d1, d2) degrees of freedom.
double FUpperTailP(double f, double d1, double d2);
// Two-sided normal p-value, 2 * (1 - Phi(|z|)).
double NormalTwoSidedP(double z);

double Mean(std::span<const double> x);
// Unbiased (n - 1) sample variance.
double Variance(std::span<const double> x);

struct TestResult {
  double statistic = 0.0;
  double dof = 0.0;                   // numerator dof for F
  std::optional<double> dof2;         // denominator dof for F
  double p_value = 1.0;
  std::optional<double> effect_size;  // Cohen's d for t tests
};

// One-way ANOVA. Each group needs at least two observations.
TestResult OneWayAnova(std::span<const std::vector<double>> groups);

// Unequal-variance t test with Welch-Satterthwaite dof; effect_size is
// Cohen's d. Throws StatsError if both samples have zero variance.
TestResult WelchT(std::span<const double> a, std::span<const double> b);

// Equal-variance (pooled) two-sample t test.
TestResult PooledT(std::span<const double> a, std::span<const double> b);

// (mean(a) - mean(b)) over the pooled standard deviation with an
// n_a + n_b - 2 denominator.
double CohensD(std::span<const double> a, std::span<const double> b);

// "*", "**", "***" for p < .1, .05, .01; empty otherwise.
std::string SignificanceStars(double p);

// ---------------------------------------------------------------------------
// Survey scale

enum class LikertBin { kNegative = 0, kNeutral = 1, kPositive = 2 };

// 1,2 -> negative; 3 -> neutral; 4,5 -> positive. Throws StatsError off grid.
LikertBin BinLikert(int score);
std::string_view LikertBinName(LikertBin bin);

// ---------------------------------------------------------------------------
// Proportional-odds ordinal logistic regression.
//
// Convention: P(Y <= j | x) = logistic(theta_j - x . beta) with increasing
// cutpoints theta. A positive coefficient shifts mass to higher categories.

struct OlrCoefficient {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double t_value = 0.0;   // Wald statistic
  double p_value = 1.0;   // two-sided, normal reference
  double odds_ratio = 1.0;
  double ci_lower = 0.0;  // 2.5%, on the coefficient scale
  double ci_upper = 0.0;  // 97.5%
};

struct OlrFit {
  std::vector<OlrCoefficient> coefficients;
  std::vector<OlrCoefficient> cutpoints;  // names "0|1", "1|2", ...
  double log_likelihood = 0.0;
  // Log-likelihood after each accepted Newton step (first entry: start).
  std::vector<double> log_likelihood_trace;
  int iterations = 0;
  bool converged = false;
};

struct OlrOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
  int max_step_halvings = 40;
};

// `predictors` is row-major n x p (p may be zero); `outcome` holds category
// indices 0..levels-1 with at least two distinct values observed.
// Throws StatsError on degenerate designs (constant or collinear predictor
// columns), suspected complete separation and non-convergence.
OlrFit FitOrdinalLogistic(std::span<const double> predictors, std::size_t num_predictors,
                          std::span<const int> outcome, int levels,
                          std::span<const std::string> names = {},
                          const OlrOptions& options = {});

}  // namespace divrec::stats

#endif  // DIVREC_STATS_H_
