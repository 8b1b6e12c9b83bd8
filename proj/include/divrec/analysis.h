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

#ifndef DIVREC_ANALYSIS_H_
#define DIVREC_ANALYSIS_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divrec/experiment.h"
#include "divrec/stats.h"

namespace divrec {

// ---------------------------------------------------------------------------
// Post-experiment survey

inline constexpr std::array<std::string_view, 8> kSurveyItems = {
    "accuracy",        "diversity",   "novelty",      "level_of_effort",
    "trustworthiness", "ease_of_use", "satisfaction", "usage_frequency"};
inline constexpr std::size_t kSatisfactionItem = 6;

struct SurveyResponse {
  UserId user_id = 0;
  std::array<int, kSurveyItems.size()> scores{};  // 1..5, order of kSurveyItems
  std::optional<int> slider_level;                // slider-group question 1
  std::string comment;

  bool operator==(const SurveyResponse&) const = default;
};

// CSV columns: user_id, the eight items, slider_q1, comment.
void WriteSurvey(std::span<const SurveyResponse> responses, const std::filesystem::path& path);
std::vector<SurveyResponse> ReadSurvey(const std::filesystem::path& path);

// Numeric coding used as OLR predictors.
int InterfaceCode(Treatment t);  // Control 0, BRC 1, BRC_DS 2
int HabitCode(Cohort c);         // D 1, ND 2

struct SurveyOlrOptions {
  // Only the two treatment interfaces are regressed by default.
  bool include_control = false;
};

// Satisfaction (binned negative/neutral/positive) on interface, consumption
// habit and the remaining survey items. Responses from users without an arm
// are ignored.
stats::OlrFit FitSurveyOlr(std::span<const SurveyResponse> responses,
                           const std::map<UserId, Arm>& arms,
                           const SurveyOlrOptions& options = {});

// ---------------------------------------------------------------------------
// Interaction metrics report

struct WindowMetrics {
  std::string name;  // "pre", "during", "post"
  Window window;
  std::map<UserId, MetricsRecord> records;
};

struct MeansRow {
  std::string window;
  Arm arm;
  std::string metric;
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // NaN below two observations
};

struct AnovaRow {
  std::string window;
  Cohort cohort = Cohort::kDiverse;
  std::string metric;
  stats::TestResult result;
};

struct PairwiseRow {
  std::string window;
  std::string metric;
  Arm a;
  Arm b;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  stats::TestResult result;  // Welch; effect_size is Cohen's d
};

struct AnalysisReport {
  std::vector<MeansRow> means;
  std::vector<AnovaRow> anova;
  std::vector<PairwiseRow> pairwise;
  std::vector<std::string> skipped;  // comparisons that could not be run
  std::optional<stats::OlrFit> olr;
  std::string olr_error;

  // Number of tests run (ANOVA + pairwise) and those with p < alpha.
  std::size_t TestCount() const { return anova.size() + pairwise.size(); }
  std::size_t FlaggedCount(double alpha) const;
};

// Per window: within each cohort a one-way ANOVA across the three treatments
// and Welch tests for every treatment pair; within each treatment a Welch
// test D vs ND. sliderInteractions exists only for BRC_DS and is compared
// D vs ND there. Missing avgRating values are dropped per test.
// Throws std::invalid_argument when `windows` is empty or a window has no
// records.
AnalysisReport AnalyzeExperiment(const std::map<UserId, Arm>& arms,
                                 std::span<const WindowMetrics> windows);

// Writes means.csv, anova.csv, pairwise.csv, olr.csv (when fitted) and
// summary.txt into `dir`.
void WriteReport(const AnalysisReport& report, const std::filesystem::path& dir);
std::string FormatReportSummary(const AnalysisReport& report);

// Lookup helper for tests and the summary: the Welch row for (window,
// metric, a, b) in either order, or nullptr.
const PairwiseRow* FindPairwise(const AnalysisReport& report, std::string_view window,
                                std::string_view metric, const Arm& a, const Arm& b);

}  // namespace divrec

#endif  // DIVREC_ANALYSIS_H_
