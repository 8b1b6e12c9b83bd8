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

#include "divrec/analysis.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "csv.h"

namespace divrec {
namespace {

constexpr std::size_t kSliderMetric = 1;

std::string SurveyHeader() {
  std::string h = "user_id";
  for (auto item : kSurveyItems) h += "," + std::string(item);
  return h + ",slider_q1,comment";
}

int ParseLikert(std::string_view text, long line) {
  const long long v = csv::ParseInt(text, line);
  if (v < 1 || v > 5) throw DataError("Likert score off the 1..5 grid", line);
  return static_cast<int>(v);
}

std::vector<double> Values(const std::map<UserId, MetricsRecord>& records,
                           const std::map<UserId, Arm>& arms, const Arm& arm,
                           std::size_t metric) {
  std::vector<double> out;
  for (const auto& [user, record] : records) {
    auto it = arms.find(user);
    if (it == arms.end() || it->second != arm) continue;
    const double v = MetricValue(record, metric);
    if (!std::isnan(v)) out.push_back(v);
  }
  return out;
}

double SampleSd(const std::vector<double>& x) {
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(stats::Variance(x));
}

std::string Describe(const std::string& window, std::string_view metric, const std::string& what) {
  return window + "/" + std::string(metric) + ": " + what;
}

std::string Fmt(double v) { return csv::FormatDouble(v); }

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Survey

void WriteSurvey(std::span<const SurveyResponse> responses, const std::filesystem::path& path) {
  auto out = OpenOut(path);
  out << SurveyHeader() << '\n';
  for (const auto& r : responses) {
    out << r.user_id;
    for (int s : r.scores) out << ',' << s;
    out << ',';
    if (r.slider_level) out << *r.slider_level;
    out << ',' << csv::Escape(r.comment) << '\n';
  }
}

std::vector<SurveyResponse> ReadSurvey(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  csv::ExpectHeader(in, SurveyHeader(), path.string());
  std::vector<SurveyResponse> out;
  std::set<UserId> seen;
  std::string line;
  long line_no = 1;
  while (csv::ReadLine(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::SplitRecord(line);
    if (f.size() != kSurveyItems.size() + 3) throw DataError("malformed survey row", line_no);
    SurveyResponse r;
    r.user_id = csv::ParseInt(f[0], line_no);
    for (std::size_t i = 0; i < kSurveyItems.size(); ++i) {
      r.scores[i] = ParseLikert(f[i + 1], line_no);
    }
    const auto& slider = f[kSurveyItems.size() + 1];
    if (!slider.empty()) r.slider_level = ParseLikert(slider, line_no);
    r.comment = f.back();
    if (!seen.insert(r.user_id).second) throw DataError("duplicate survey response", line_no);
    out.push_back(std::move(r));
  }
  return out;
}

int InterfaceCode(Treatment t) {
  switch (t) {
    case Treatment::kControl:
      return 0;
    case Treatment::kBrc:
      return 1;
    case Treatment::kBrcDs:
      return 2;
  }
  return 0;
}

int HabitCode(Cohort c) { return c == Cohort::kDiverse ? 1 : 2; }

stats::OlrFit FitSurveyOlr(std::span<const SurveyResponse> responses,
                           const std::map<UserId, Arm>& arms,
                           const SurveyOlrOptions& options) {
  std::vector<std::string> names = {"interface", "consumption_habit"};
  for (std::size_t i = 0; i < kSurveyItems.size(); ++i) {
    if (i != kSatisfactionItem) names.emplace_back(kSurveyItems[i]);
  }
  std::vector<double> x;
  std::vector<int> y;
  for (const auto& r : responses) {
    auto it = arms.find(r.user_id);
    if (it == arms.end()) continue;
    const Arm& arm = it->second;
    if (!options.include_control && arm.treatment == Treatment::kControl) continue;
    x.push_back(InterfaceCode(arm.treatment));
    x.push_back(HabitCode(arm.cohort));
    for (std::size_t i = 0; i < kSurveyItems.size(); ++i) {
      if (i != kSatisfactionItem) x.push_back(r.scores[i]);
    }
    y.push_back(static_cast<int>(stats::BinLikert(r.scores[kSatisfactionItem])));
  }
  return stats::FitOrdinalLogistic(x, names.size(), y, 3, names);
}

// ---------------------------------------------------------------------------
// Metrics report

std::size_t AnalysisReport::FlaggedCount(double alpha) const {
  std::size_t n = 0;
  for (const auto& r : anova) n += r.result.p_value < alpha;
  for (const auto& r : pairwise) n += r.result.p_value < alpha;
  return n;
}

AnalysisReport AnalyzeExperiment(const std::map<UserId, Arm>& arms,
                                 std::span<const WindowMetrics> windows) {
  if (windows.empty()) throw std::invalid_argument("analysis needs at least one window");
  AnalysisReport report;
  for (const auto& w : windows) {
    if (w.records.empty()) {
      throw std::invalid_argument("window '" + w.name + "' has no metrics records");
    }
    for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
      const std::string metric(kMetricNames[m]);
      std::map<Arm, std::vector<double>> values;
      for (Cohort c : kCohorts) {
        for (Treatment t : kTreatments) {
          const Arm arm{c, t};
          auto& v = values[arm] = Values(w.records, arms, arm, m);
          double mean = std::numeric_limits<double>::quiet_NaN();
          if (!v.empty()) mean = stats::Mean(v);
          report.means.push_back({w.name, arm, metric, v.size(), mean, SampleSd(v)});
        }
      }

      auto welch = [&](const Arm& a, const Arm& b) {
        const auto& va = values[a];
        const auto& vb = values[b];
        const std::string label = ArmLabel(a) + " vs " + ArmLabel(b);
        try {
          PairwiseRow row{w.name, metric, a, b, va.size(), vb.size(), 0.0, 0.0, {}};
          row.result = stats::WelchT(va, vb);
          row.mean_a = stats::Mean(va);
          row.mean_b = stats::Mean(vb);
          report.pairwise.push_back(std::move(row));
        } catch (const stats::StatsError& e) {
          report.skipped.push_back(Describe(w.name, metric, label + " (" + e.what() + ")"));
        }
      };

      if (m == kSliderMetric) {
        welch({Cohort::kDiverse, Treatment::kBrcDs}, {Cohort::kNonDiverse, Treatment::kBrcDs});
        continue;
      }
      for (Cohort c : kCohorts) {
        std::vector<std::vector<double>> groups;
        for (Treatment t : kTreatments) groups.push_back(values[{c, t}]);
        try {
          report.anova.push_back({w.name, c, metric, stats::OneWayAnova(groups)});
        } catch (const stats::StatsError& e) {
          report.skipped.push_back(
              Describe(w.name, metric, "ANOVA " + std::string(CohortName(c)) + " (" + e.what() + ")"));
        }
        for (std::size_t i = 0; i < kTreatments.size(); ++i) {
          for (std::size_t j = i + 1; j < kTreatments.size(); ++j) {
            welch({c, kTreatments[i]}, {c, kTreatments[j]});
          }
        }
      }
      for (Treatment t : kTreatments) {
        welch({Cohort::kDiverse, t}, {Cohort::kNonDiverse, t});
      }
    }
  }
  return report;
}

const PairwiseRow* FindPairwise(const AnalysisReport& report, std::string_view window,
                                std::string_view metric, const Arm& a, const Arm& b) {
  for (const auto& r : report.pairwise) {
    if (r.window != window || r.metric != metric) continue;
    if ((r.a == a && r.b == b) || (r.a == b && r.b == a)) return &r;
  }
  return nullptr;
}

void WriteReport(const AnalysisReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = OpenOut(dir / "means.csv");
    out << "window,cohort,treatment,metric,n,mean,sd\n";
    for (const auto& r : report.means) {
      out << r.window << ',' << CohortName(r.arm.cohort) << ',' << TreatmentName(r.arm.treatment)
          << ',' << r.metric << ',' << r.n << ',' << Fmt(r.mean) << ',' << Fmt(r.sd) << '\n';
    }
  }
  {
    auto out = OpenOut(dir / "anova.csv");
    out << "window,cohort,metric,F,df1,df2,p,stars\n";
    for (const auto& r : report.anova) {
      out << r.window << ',' << CohortName(r.cohort) << ',' << r.metric << ','
          << Fmt(r.result.statistic) << ',' << Fmt(r.result.dof) << ','
          << Fmt(r.result.dof2.value_or(0.0)) << ',' << Fmt(r.result.p_value) << ','
          << stats::SignificanceStars(r.result.p_value) << '\n';
    }
  }
  {
    auto out = OpenOut(dir / "pairwise.csv");
    out << "window,metric,group_a,group_b,n_a,n_b,mean_a,mean_b,t,dof,p,cohens_d,stars\n";
    for (const auto& r : report.pairwise) {
      out << r.window << ',' << r.metric << ',' << ArmLabel(r.a) << ',' << ArmLabel(r.b) << ','
          << r.n_a << ',' << r.n_b << ',' << Fmt(r.mean_a) << ',' << Fmt(r.mean_b) << ','
          << Fmt(r.result.statistic) << ',' << Fmt(r.result.dof) << ','
          << Fmt(r.result.p_value) << ',' << Fmt(r.result.effect_size.value_or(0.0)) << ','
          << stats::SignificanceStars(r.result.p_value) << '\n';
    }
  }
  if (report.olr) {
    auto out = OpenOut(dir / "olr.csv");
    out << "term,coef,std_error,t_value,p_value,odds_ratio,ci_2.5,ci_97.5\n";
    auto row = [&](const stats::OlrCoefficient& c) {
      out << c.name << ',' << Fmt(c.estimate) << ',' << Fmt(c.std_error) << ','
          << Fmt(c.t_value) << ',' << Fmt(c.p_value) << ',' << Fmt(c.odds_ratio) << ','
          << Fmt(c.ci_lower) << ',' << Fmt(c.ci_upper) << '\n';
    };
    for (const auto& c : report.olr->coefficients) row(c);
    for (const auto& c : report.olr->cutpoints) row(c);
  }
  auto out = OpenOut(dir / "summary.txt");
  out << FormatReportSummary(report);
}

std::string FormatReportSummary(const AnalysisReport& report) {
  std::ostringstream s;
  s << "tests run: " << report.TestCount() << '\n';
  s << "significant at p<.1: " << report.FlaggedCount(0.1) << '\n';
  s << "significant at p<.05: " << report.FlaggedCount(0.05) << '\n';
  s << "skipped: " << report.skipped.size() << '\n';
  s << "\nsignificant comparisons (* p<.1, ** p<.05, *** p<.01)\n";
  for (const auto& r : report.anova) {
    if (r.result.p_value >= 0.1) continue;
    s << "  " << r.window << ' ' << r.metric << " ANOVA " << CohortName(r.cohort)
      << ": F=" << Fmt(r.result.statistic) << " p=" << Fmt(r.result.p_value) << ' '
      << stats::SignificanceStars(r.result.p_value) << '\n';
  }
  for (const auto& r : report.pairwise) {
    if (r.result.p_value >= 0.1) continue;
    s << "  " << r.window << ' ' << r.metric << ' ' << ArmLabel(r.a) << " vs " << ArmLabel(r.b)
      << ": t=" << Fmt(r.result.statistic) << " dof=" << Fmt(r.result.dof)
      << " p=" << Fmt(r.result.p_value) << " d=" << Fmt(r.result.effect_size.value_or(0.0))
      << ' ' << stats::SignificanceStars(r.result.p_value) << '\n';
  }
  for (const auto& note : report.skipped) s << "  skipped " << note << '\n';
  if (report.olr) {
    s << "\nordinal logistic regression on satisfaction (log-likelihood "
      << Fmt(report.olr->log_likelihood) << ", " << report.olr->iterations << " iterations)\n";
    for (const auto& c : report.olr->coefficients) {
      s << "  " << c.name << ": coef=" << Fmt(c.estimate) << " se=" << Fmt(c.std_error)
        << " p=" << Fmt(c.p_value) << ' ' << stats::SignificanceStars(c.p_value) << '\n';
    }
  } else if (!report.olr_error.empty()) {
    s << "\nordinal logistic regression failed: " << report.olr_error << '\n';
  }
  return s.str();
}

}  // namespace divrec
