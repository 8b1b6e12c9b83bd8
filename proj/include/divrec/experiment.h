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

#ifndef DIVREC_EXPERIMENT_H_
#define DIVREC_EXPERIMENT_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divrec/corpus.h"
#include "divrec/types.h"

namespace divrec {

enum class Cohort { kDiverse, kNonDiverse };
enum class Treatment { kControl, kBrc, kBrcDs };

inline constexpr std::array<Cohort, 2> kCohorts = {Cohort::kDiverse, Cohort::kNonDiverse};
inline constexpr std::array<Treatment, 3> kTreatments = {Treatment::kControl, Treatment::kBrc,
                                                        Treatment::kBrcDs};

struct Arm {
  Cohort cohort = Cohort::kNonDiverse;
  Treatment treatment = Treatment::kControl;
  auto operator<=>(const Arm&) const = default;
};

std::string_view CohortName(Cohort cohort);           // "D" / "ND"
std::string_view TreatmentName(Treatment treatment);  // "Control" / "BRC" / "BRC_DS"
std::string ArmLabel(const Arm& arm);                 // e.g. "ND-BRC_DS"
Cohort ParseCohort(std::string_view name);
Treatment ParseTreatment(std::string_view name);

// Treatment for a user under `seed`: a fixed 64-bit mix of (user, seed)
// reduced mod 3. Pure; never reshuffles.
Treatment AssignTreatment(UserId user, std::uint64_t seed);

class UnenrolledUser : public std::runtime_error {
 public:
  explicit UnenrolledUser(UserId user)
      : std::runtime_error("user " + std::to_string(user) + " is not enrolled") {}
};

// Users enrolled in the experiment, each in exactly one cohort.
class Enrollment {
 public:
  Enrollment() = default;
  explicit Enrollment(std::map<UserId, Cohort> cohorts) : cohorts_(std::move(cohorts)) {}

  bool Contains(UserId user) const { return cohorts_.count(user) > 0; }
  const std::map<UserId, Cohort>& cohorts() const { return cohorts_; }

  // Throws UnenrolledUser.
  Arm AssignArm(UserId user, std::uint64_t seed) const;
  std::map<UserId, Arm> AssignAll(std::uint64_t seed) const;

 private:
  std::map<UserId, Cohort> cohorts_;
};

// Enrollment filter: logged in at least 12 times and rated at least 20 items.
inline constexpr int kMinLogins = 12;
inline constexpr int kMinRatings = 20;
bool MeetsActivityCriterion(int logins, int ratings);

// ---------------------------------------------------------------------------
// Interaction log

inline constexpr int kEventSchemaVersion = 1;

enum class EventKind {
  kLogin,
  kLogout,
  kPageView,
  kSliderSet,
  kRating,
  kWishlistAdd,
  kCarouselClick,
  kInfoAck,
};

std::string_view EventKindName(EventKind kind);
EventKind ParseEventKind(std::string_view name);

struct InteractionEvent {
  UserId user_id = 0;
  std::string token;
  EventKind kind = EventKind::kLogin;
  Timestamp timestamp = 0;
  std::optional<MovieId> movie_id;      // page_view, rating, wishlist_add
  std::optional<int> level;             // slider_set
  std::optional<double> rating;         // rating
  std::optional<Treatment> treatment;   // carousel_click

  bool operator==(const InteractionEvent&) const = default;
};

// Total order used wherever event order must not depend on input order.
bool EventLess(const InteractionEvent& a, const InteractionEvent& b);

std::string ToJsonLine(const InteractionEvent& event);
// Throws DataError naming `line` on malformed input or a schema mismatch.
InteractionEvent ParseJsonLine(std::string_view text, long line = -1);
std::vector<InteractionEvent> ReadEventLog(const std::filesystem::path& path);
void WriteEventLog(std::span<const InteractionEvent> events,
                   const std::filesystem::path& path);

// Events that break the arm contract (slider_set outside BRC_DS, events from
// unenrolled users). Returned as human-readable descriptions.
std::vector<std::string> ValidateEvents(std::span<const InteractionEvent> events,
                                        const std::map<UserId, Arm>& arms);

// ---------------------------------------------------------------------------
// Sessions and windows

inline constexpr int kDefaultSessionTimeoutMinutes = 30;

struct Session {
  UserId user_id = 0;
  Timestamp start = 0;
  Timestamp end = 0;
  std::vector<InteractionEvent> events;
};

// Groups events per user. A login always opens a session, as does a gap of
// at least `timeout_minutes` since the previous event. Sessions come back
// ordered by (user_id, start).
std::vector<Session> Sessionize(std::span<const InteractionEvent> events,
                                int timeout_minutes = kDefaultSessionTimeoutMinutes);

// Half-open [start, end) in epoch seconds.
struct Window {
  Timestamp start = 0;
  Timestamp end = 0;
  double Days() const { return static_cast<double>(end - start) / 86400.0; }
  bool Contains(Timestamp t) const { return t >= start && t < end; }
  bool operator==(const Window&) const = default;
};

// "2022-11-04..2022-12-16": both days inclusive, UTC.
Window ParseDateRange(std::string_view text);
Timestamp ParseDate(std::string_view yyyy_mm_dd);
std::string FormatDate(Timestamp t);

// ---------------------------------------------------------------------------
// Interaction metrics

struct MetricsRecord {
  double rating_diversity = 0.0;
  std::int64_t slider_interactions = 0;
  double page_view_freq = 0.0;
  double login_frequency = 0.0;
  double total_length = 0.0;  // minutes
  std::int64_t num_ratings = 0;
  double wishlist_freq = 0.0;
  std::optional<double> avg_rating;

  bool operator==(const MetricsRecord&) const = default;
};

inline constexpr std::array<std::string_view, 8> kMetricNames = {
    "ratingDiversity", "sliderInteractions", "pageViewFreq", "loginFrequency",
    "totalLength",     "numRatings",         "wishlistFreq", "avgRating"};

// Value of metric `index` (see kMetricNames); NaN for a missing avgRating.
double MetricValue(const MetricsRecord& record, std::size_t index);

// Logins per 30 days of window.
double PerMonth(std::int64_t count, const Window& window);

// Interaction metrics for `user` over the events inside `window`:
//   ratingDiversity     list diversity of distinct movies rated (0 below two)
//   sliderInteractions  slider_set events
//   pageViewFreq        distinct page_view movies per session, averaged
//   loginFrequency      login events per 30 days
//   totalLength         summed session spans, minutes
//   numRatings          distinct movies rated
//   wishlistFreq        distinct wishlist_add movies per session, averaged
//   avgRating           mean of each rated movie's latest value
MetricsRecord ComputeMetrics(UserId user, std::span<const InteractionEvent> events,
                             const Window& window, const GenomeTable& genome,
                             int timeout_minutes = kDefaultSessionTimeoutMinutes);

// ComputeMetrics for every user in `users`.
std::map<UserId, MetricsRecord> ComputeAllMetrics(
    std::span<const UserId> users, std::span<const InteractionEvent> events,
    const Window& window, const GenomeTable& genome,
    int timeout_minutes = kDefaultSessionTimeoutMinutes);

// ---------------------------------------------------------------------------
// CSV helpers for cohort and arm tables.

struct CohortRow {
  UserId user_id = 0;
  double score = 0.0;
  Cohort cohort = Cohort::kNonDiverse;
};

void WriteCohorts(std::span<const CohortRow> rows, const std::filesystem::path& path);
std::vector<CohortRow> ReadCohorts(const std::filesystem::path& path);
void WriteArms(const std::map<UserId, Arm>& arms, const std::filesystem::path& path);
std::map<UserId, Arm> ReadArms(const std::filesystem::path& path);

}  // namespace divrec

#endif  // DIVREC_EXPERIMENT_H_
