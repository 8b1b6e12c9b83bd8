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

#include "divrec/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace divrec::stats {
namespace {

constexpr double kZ975 = 1.959963984540054;

// Continued fraction for the incomplete beta (modified Lentz).
double BetaContinuedFraction(double a, double b, double x) {
  constexpr int kMaxIterations = 100000;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) return h;
  }
  throw StatsError("incomplete beta continued fraction did not converge");
}

double Logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void RequireSamples(std::span<const double> x, const char* what) {
  if (x.size() < 2) {
    throw StatsError(std::string(what) + ": each sample needs at least two observations");
  }
}

}  // namespace

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw StatsError("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double StudentTTwoSidedP(double t, double dof) {
  if (!(dof > 0.0)) throw StatsError("t distribution needs dof > 0");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return std::clamp(RegularizedIncompleteBeta(0.5 * dof, 0.5, x), 0.0, 1.0);
}

double FUpperTailP(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw StatsError("F distribution needs positive dof");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double x = d2 / (d2 + d1 * f);
  return std::clamp(RegularizedIncompleteBeta(0.5 * d2, 0.5 * d1, x), 0.0, 1.0);
}

double NormalTwoSidedP(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

double Mean(std::span<const double> x) {
  if (x.empty()) throw StatsError("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double Variance(std::span<const double> x) {
  if (x.size() < 2) throw StatsError("variance needs at least two observations");
  const double m = Mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

TestResult OneWayAnova(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw StatsError("ANOVA needs at least two groups");
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& g : groups) {
    RequireSamples(g, "ANOVA");
    total += std::accumulate(g.begin(), g.end(), 0.0);
    n += g.size();
  }
  const double grand_mean = total / static_cast<double>(n);
  double between = 0.0;
  double within = 0.0;
  for (const auto& g : groups) {
    const double m = Mean(g);
    between += static_cast<double>(g.size()) * (m - grand_mean) * (m - grand_mean);
    for (double v : g) within += (v - m) * (v - m);
  }
  const double df1 = static_cast<double>(groups.size() - 1);
  const double df2 = static_cast<double>(n - groups.size());
  if (within <= 0.0) throw StatsError("ANOVA: zero within-group variance");
  TestResult r;
  r.statistic = (between / df1) / (within / df2);
  r.dof = df1;
  r.dof2 = df2;
  r.p_value = FUpperTailP(r.statistic, df1, df2);
  return r;
}

double CohensD(std::span<const double> a, std::span<const double> b) {
  RequireSamples(a, "Cohen's d");
  RequireSamples(b, "Cohen's d");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double pooled = ((na - 1.0) * Variance(a) + (nb - 1.0) * Variance(b)) / (na + nb - 2.0);
  if (pooled <= 0.0) throw StatsError("Cohen's d: zero pooled variance");
  return (Mean(a) - Mean(b)) / std::sqrt(pooled);
}

TestResult WelchT(std::span<const double> a, std::span<const double> b) {
  RequireSamples(a, "Welch t");
  RequireSamples(b, "Welch t");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = Variance(a);
  const double vb = Variance(b);
  if (va <= 0.0 && vb <= 0.0) throw StatsError("Welch t: both samples have zero variance");
  const double qa = va / na;
  const double qb = vb / nb;
  const double se2 = qa + qb;
  TestResult r;
  r.statistic = (Mean(a) - Mean(b)) / std::sqrt(se2);
  r.dof = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
  r.p_value = StudentTTwoSidedP(r.statistic, r.dof);
  r.effect_size = CohensD(a, b);
  return r;
}

TestResult PooledT(std::span<const double> a, std::span<const double> b) {
  RequireSamples(a, "pooled t");
  RequireSamples(b, "pooled t");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double pooled = ((na - 1.0) * Variance(a) + (nb - 1.0) * Variance(b)) / (na + nb - 2.0);
  if (pooled <= 0.0) throw StatsError("pooled t: zero pooled variance");
  TestResult r;
  r.statistic = (Mean(a) - Mean(b)) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  r.dof = na + nb - 2.0;
  r.p_value = StudentTTwoSidedP(r.statistic, r.dof);
  r.effect_size = (Mean(a) - Mean(b)) / std::sqrt(pooled);
  return r;
}

std::string SignificanceStars(double p) {
  if (!(p < 0.1)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  return "*";
}

LikertBin BinLikert(int score) {
  if (score < 1 || score > 5) {
    throw StatsError("Likert score must be on the 1..5 grid, got " + std::to_string(score));
  }
  if (score <= 2) return LikertBin::kNegative;
  if (score == 3) return LikertBin::kNeutral;
  return LikertBin::kPositive;
}

std::string_view LikertBinName(LikertBin bin) {
  switch (bin) {
    case LikertBin::kNegative:
      return "negative";
    case LikertBin::kNeutral:
      return "neutral";
    case LikertBin::kPositive:
      return "positive";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Ordinal logistic regression

namespace {

struct OlrProblem {
  const double* x;  // n x p row-major
  std::size_t n;
  std::size_t p;
  std::vector<int> y;  // compacted categories 0..J-1
  int categories;
};

// Log-likelihood plus (optionally) gradient and Hessian at `phi`
// = [cutpoints..., beta...].
double Evaluate(const OlrProblem& prob, const Eigen::VectorXd& phi, Eigen::VectorXd* grad,
                Eigen::MatrixXd* hess) {
  const int m = prob.categories - 1;
  const std::size_t dim = static_cast<std::size_t>(m) + prob.p;
  if (grad) grad->setZero(dim);
  if (hess) hess->setZero(dim, dim);
  Eigen::VectorXd dp(dim);
  Eigen::MatrixXd d2p(dim, dim);
  double ll = 0.0;
  for (std::size_t i = 0; i < prob.n; ++i) {
    const double* xi = prob.x + i * prob.p;
    double eta = 0.0;
    for (std::size_t j = 0; j < prob.p; ++j) eta += xi[j] * phi[m + j];
    const int k = prob.y[i];
    const bool has_upper = k < m;
    const bool has_lower = k > 0;
    const double a = has_upper ? phi[k] - eta : 0.0;
    const double b = has_lower ? phi[k - 1] - eta : 0.0;
    const double fa_cdf = has_upper ? Logistic(a) : 1.0;
    const double fb_cdf = has_lower ? Logistic(b) : 0.0;
    // 1 - F(b) is more accurate than F(a) - F(b) for the top category.
    double prob_i = has_upper ? fa_cdf - fb_cdf : Logistic(-b);
    if (!has_lower) prob_i = fa_cdf;
    if (!(prob_i > 0.0)) return -std::numeric_limits<double>::infinity();
    ll += std::log(prob_i);
    if (!grad && !hess) continue;

    const double fa = has_upper ? fa_cdf * (1.0 - fa_cdf) : 0.0;
    const double fb = has_lower ? fb_cdf * (1.0 - fb_cdf) : 0.0;
    const double ga = has_upper ? fa * (1.0 - 2.0 * fa_cdf) : 0.0;
    const double gb = has_lower ? fb * (1.0 - 2.0 * fb_cdf) : 0.0;
    dp.setZero();
    if (has_upper) dp[k] = fa;
    if (has_lower) dp[k - 1] = -fb;
    for (std::size_t j = 0; j < prob.p; ++j) dp[m + j] = -xi[j] * (fa - fb);
    if (grad) *grad += dp / prob_i;
    if (hess) {
      d2p.setZero();
      if (has_upper) {
        d2p(k, k) = ga;
        for (std::size_t j = 0; j < prob.p; ++j) d2p(k, m + j) = d2p(m + j, k) = -xi[j] * ga;
      }
      if (has_lower) {
        d2p(k - 1, k - 1) = -gb;
        for (std::size_t j = 0; j < prob.p; ++j) {
          d2p(k - 1, m + j) = d2p(m + j, k - 1) = xi[j] * gb;
        }
      }
      for (std::size_t r = 0; r < prob.p; ++r) {
        for (std::size_t c = 0; c < prob.p; ++c) d2p(m + r, m + c) = xi[r] * xi[c] * (ga - gb);
      }
      *hess += d2p / prob_i - dp * dp.transpose() / (prob_i * prob_i);
    }
  }
  return ll;
}

bool CutpointsIncreasing(const Eigen::VectorXd& phi, int m) {
  for (int j = 1; j < m; ++j) {
    if (!(phi[j] > phi[j - 1])) return false;
  }
  return true;
}

OlrCoefficient MakeCoefficient(std::string name, double estimate, double variance) {
  OlrCoefficient c;
  c.name = std::move(name);
  c.estimate = estimate;
  c.std_error = std::sqrt(std::max(variance, 0.0));
  c.t_value = estimate / c.std_error;
  c.p_value = NormalTwoSidedP(c.t_value);
  c.odds_ratio = std::exp(estimate);
  c.ci_lower = estimate - kZ975 * c.std_error;
  c.ci_upper = estimate + kZ975 * c.std_error;
  return c;
}

}  // namespace

OlrFit FitOrdinalLogistic(std::span<const double> predictors, std::size_t num_predictors,
                          std::span<const int> outcome, int levels,
                          std::span<const std::string> names, const OlrOptions& options) {
  const std::size_t n = outcome.size();
  if (predictors.size() != n * num_predictors) {
    throw StatsError("OLR: predictor matrix does not match outcome length");
  }
  if (!names.empty() && names.size() != num_predictors) {
    throw StatsError("OLR: predictor names do not match predictor count");
  }
  if (levels < 2) throw StatsError("OLR: need at least two outcome levels");

  // Drop unobserved levels so every remaining cutpoint is identified.
  std::vector<int> observed;
  for (int v : outcome) {
    if (v < 0 || v >= levels) throw StatsError("OLR: outcome outside 0..levels-1");
    observed.push_back(v);
  }
  std::sort(observed.begin(), observed.end());
  observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
  if (observed.size() < 2) throw StatsError("OLR: outcome has fewer than two observed levels");

  OlrProblem prob{predictors.data(), n, num_predictors, {}, static_cast<int>(observed.size())};
  prob.y.reserve(n);
  for (int v : outcome) {
    prob.y.push_back(static_cast<int>(std::lower_bound(observed.begin(), observed.end(), v) -
                                      observed.begin()));
  }
  auto predictor_name = [&](std::size_t j) {
    return names.empty() ? "x" + std::to_string(j + 1) : names[j];
  };
  for (std::size_t j = 0; j < num_predictors; ++j) {
    const double first = predictors[j];
    bool constant = true;
    for (std::size_t i = 1; i < n && constant; ++i) constant = predictors[i * num_predictors + j] == first;
    if (constant) {
      throw StatsError("OLR: degenerate design, predictor '" + predictor_name(j) +
                       "' is constant (coefficient not identifiable)");
    }
  }

  const int m = prob.categories - 1;
  const std::size_t dim = static_cast<std::size_t>(m) + num_predictors;
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(dim);
  {
    std::vector<double> counts(prob.categories, 0.0);
    for (int v : prob.y) counts[v] += 1.0;
    double cumulative = 0.0;
    for (int j = 0; j < m; ++j) {
      cumulative += counts[j] / static_cast<double>(n);
      phi[j] = std::log(cumulative / (1.0 - cumulative));
    }
  }

  OlrFit fit;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  double ll = Evaluate(prob, phi, &grad, &hess);
  fit.log_likelihood_trace.push_back(ll);
  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      fit.converged = true;
      break;
    }
    Eigen::LDLT<Eigen::MatrixXd> solver(-hess);
    if (solver.info() != Eigen::Success || !solver.isPositive() ||
        solver.vectorD().minCoeff() <= 1e-12 * std::max(1.0, solver.vectorD().maxCoeff())) {
      throw StatsError("OLR: information matrix is singular (collinear predictors?)");
    }
    const Eigen::VectorXd step = solver.solve(grad);
    // Newton decrement: predicted log-likelihood gain of a full step. Once it
    // is at rounding level the absolute gradient test may never be met.
    if (grad.dot(step) < 1e-12 * (1.0 + std::abs(ll))) {
      fit.converged = true;
      break;
    }
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_step_halvings; ++h, scale *= 0.5) {
      const Eigen::VectorXd candidate = phi + scale * step;
      if (!CutpointsIncreasing(candidate, m)) continue;
      const double candidate_ll = Evaluate(prob, candidate, nullptr, nullptr);
      if (candidate_ll >= ll) {
        phi = candidate;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No ascent direction left at working precision.
      if (grad.lpNorm<Eigen::Infinity>() < 1e-6) {
        fit.converged = true;
        break;
      }
      throw StatsError("OLR: line search failed to improve the likelihood");
    }
    ll = Evaluate(prob, phi, &grad, &hess);
    fit.log_likelihood_trace.push_back(ll);
    fit.iterations = iteration + 1;
    if (phi.tail(num_predictors).cwiseAbs().maxCoeff() > 30.0) {
      throw StatsError(
          "OLR: coefficients diverging; complete or quasi-complete separation suspected");
    }
  }
  if (!fit.converged && grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
    fit.converged = true;
  }
  if (!fit.converged) {
    throw StatsError("OLR: no convergence within " + std::to_string(options.max_iterations) +
                     " iterations");
  }

  Eigen::LDLT<Eigen::MatrixXd> info(-hess);
  const Eigen::MatrixXd covariance = info.solve(Eigen::MatrixXd::Identity(dim, dim));
  fit.log_likelihood = ll;
  for (int j = 0; j < m; ++j) {
    fit.cutpoints.push_back(MakeCoefficient(
        std::to_string(observed[j]) + "|" + std::to_string(observed[j + 1]), phi[j],
        covariance(j, j)));
  }
  for (std::size_t j = 0; j < num_predictors; ++j) {
    fit.coefficients.push_back(
        MakeCoefficient(predictor_name(j), phi[m + j], covariance(m + j, m + j)));
  }
  return fit;
}

}  // namespace divrec::stats
