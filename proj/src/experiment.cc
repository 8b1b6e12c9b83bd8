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

#include "divrec/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <tuple>

#include <json.hpp>

#include "csv.h"
#include "divrec/diversity.h"
#include "divrec/random.h"

namespace divrec {

std::string_view CohortName(Cohort cohort) {
  return cohort == Cohort::kDiverse ? "D" : "ND";
}

std::string_view TreatmentName(Treatment treatment) {
  switch (treatment) {
    case Treatment::kControl:
      return "Control";
    case Treatment::kBrc:
      return "BRC";
    case Treatment::kBrcDs:
      return "BRC_DS";
  }
  return "?";
}

std::string ArmLabel(const Arm& arm) {
  return std::string(CohortName(arm.cohort)) + "-" + std::string(TreatmentName(arm.treatment));
}

Cohort ParseCohort(std::string_view name) {
  if (name == "D" || name == "Diverse") return Cohort::kDiverse;
  if (name == "ND" || name == "NonDiverse") return Cohort::kNonDiverse;
  throw DataError("unknown cohort '" + std::string(name) + "'");
}

Treatment ParseTreatment(std::string_view name) {
  if (name == "Control") return Treatment::kControl;
  if (name == "BRC") return Treatment::kBrc;
  if (name == "BRC_DS" || name == "BRC+DS") return Treatment::kBrcDs;
  throw DataError("unknown treatment '" + std::string(name) + "'");
}

Treatment AssignTreatment(UserId user, std::uint64_t seed) {
  const std::uint64_t h = Mix64(Mix64(static_cast<std::uint64_t>(user)) ^ seed);
  return kTreatments[h % 3];
}

Arm Enrollment::AssignArm(UserId user, std::uint64_t seed) const {
  auto it = cohorts_.find(user);
  if (it == cohorts_.end()) throw UnenrolledUser(user);
  return Arm{it->second, AssignTreatment(user, seed)};
}

std::map<UserId, Arm> Enrollment::AssignAll(std::uint64_t seed) const {
  std::map<UserId, Arm> arms;
  for (const auto& [user, cohort] : cohorts_) arms[user] = {cohort, AssignTreatment(user, seed)};
  return arms;
}

bool MeetsActivityCriterion(int logins, int ratings) {
  return logins >= kMinLogins && ratings >= kMinRatings;
}

// ---------------------------------------------------------------------------

std::string_view EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kLogin:
      return "login";
    case EventKind::kLogout:
      return "logout";
    case EventKind::kPageView:
      return "page_view";
    case EventKind::kSliderSet:
      return "slider_set";
    case EventKind::kRating:
      return "rating";
    case EventKind::kWishlistAdd:
      return "wishlist_add";
    case EventKind::kCarouselClick:
      return "carousel_click";
    case EventKind::kInfoAck:
      return "info_ack";
  }
  return "?";
}

EventKind ParseEventKind(std::string_view name) {
  static constexpr std::array kAll = {
      EventKind::kLogin,       EventKind::kLogout,        EventKind::kPageView,
      EventKind::kSliderSet,   EventKind::kRating,        EventKind::kWishlistAdd,
      EventKind::kCarouselClick, EventKind::kInfoAck};
  for (EventKind k : kAll) {
    if (EventKindName(k) == name) return k;
  }
  throw DataError("unknown event kind '" + std::string(name) + "'");
}

bool EventLess(const InteractionEvent& a, const InteractionEvent& b) {
  auto key = [](const InteractionEvent& e) {
    return std::make_tuple(e.user_id, e.timestamp, static_cast<int>(e.kind),
                           e.movie_id.value_or(std::numeric_limits<MovieId>::min()),
                           e.level.value_or(-1), e.rating.value_or(-1.0),
                           e.treatment ? static_cast<int>(*e.treatment) : -1);
  };
  const auto ka = key(a);
  const auto kb = key(b);
  if (ka != kb) return ka < kb;
  return a.token < b.token;
}

std::string ToJsonLine(const InteractionEvent& e) {
  nlohmann::json j{{"v", kEventSchemaVersion},
                   {"user", e.user_id},
                   {"token", e.token},
                   {"kind", EventKindName(e.kind)},
                   {"ts", e.timestamp}};
  if (e.movie_id) j["movie"] = *e.movie_id;
  if (e.level) j["level"] = *e.level;
  if (e.rating) j["rating"] = *e.rating;
  if (e.treatment) j["treatment"] = TreatmentName(*e.treatment);
  return j.dump();
}

InteractionEvent ParseJsonLine(std::string_view text, long line) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("v", -1) != kEventSchemaVersion) {
      throw DataError("unsupported event schema version", line);
    }
    InteractionEvent e;
    e.user_id = j.at("user").get<UserId>();
    e.token = j.value("token", std::string());
    e.kind = ParseEventKind(j.at("kind").get<std::string>());
    e.timestamp = j.at("ts").get<Timestamp>();
    if (j.contains("movie")) e.movie_id = j["movie"].get<MovieId>();
    if (j.contains("level")) e.level = j["level"].get<int>();
    if (j.contains("rating")) e.rating = j["rating"].get<double>();
    if (j.contains("treatment")) e.treatment = ParseTreatment(j["treatment"].get<std::string>());
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed event: ") + ex.what(), line);
  } catch (const DataError& ex) {
    if (ex.line() >= 0 || line < 0) throw;
    throw DataError(ex.what(), line);
  }
}

std::vector<InteractionEvent> ReadEventLog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<InteractionEvent> events;
  std::string line;
  long line_no = 0;
  while (csv::ReadLine(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    events.push_back(ParseJsonLine(line, line_no));
  }
  return events;
}

void WriteEventLog(std::span<const InteractionEvent> events,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& e : events) out << ToJsonLine(e) << '\n';
}

std::vector<std::string> ValidateEvents(std::span<const InteractionEvent> events,
                                        const std::map<UserId, Arm>& arms) {
  std::vector<std::string> problems;
  for (const auto& e : events) {
    auto it = arms.find(e.user_id);
    if (it == arms.end()) {
      problems.push_back("event from unenrolled user " + std::to_string(e.user_id));
      continue;
    }
    if (e.kind == EventKind::kSliderSet && it->second.treatment != Treatment::kBrcDs) {
      problems.push_back("slider_set from user " + std::to_string(e.user_id) + " in arm " +
                         ArmLabel(it->second));
    }
  }
  return problems;
}

// ---------------------------------------------------------------------------

std::vector<Session> Sessionize(std::span<const InteractionEvent> events,
                                int timeout_minutes) {
  std::vector<InteractionEvent> sorted(events.begin(), events.end());
  std::sort(sorted.begin(), sorted.end(), EventLess);
  const Timestamp timeout = static_cast<Timestamp>(timeout_minutes) * 60;
  std::vector<Session> sessions;
  for (auto& e : sorted) {
    const bool new_session = sessions.empty() || sessions.back().user_id != e.user_id ||
                             e.kind == EventKind::kLogin ||
                             e.timestamp - sessions.back().end >= timeout;
    if (new_session) {
      sessions.push_back(Session{e.user_id, e.timestamp, e.timestamp, {}});
    }
    sessions.back().end = e.timestamp;
    sessions.back().events.push_back(std::move(e));
  }
  return sessions;
}

Timestamp ParseDate(std::string_view text) {
  using namespace std::chrono;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw DataError("expected YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  const int y = static_cast<int>(csv::ParseInt(text.substr(0, 4), -1));
  const unsigned m = static_cast<unsigned>(csv::ParseInt(text.substr(5, 2), -1));
  const unsigned d = static_cast<unsigned>(csv::ParseInt(text.substr(8, 2), -1));
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw DataError("invalid date '" + std::string(text) + "'");
  return sys_seconds{sys_days{ymd}}.time_since_epoch().count();
}

std::string FormatDate(Timestamp t) {
  using namespace std::chrono;
  const year_month_day ymd{floor<days>(sys_seconds{seconds{t}})};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Window ParseDateRange(std::string_view text) {
  const auto sep = text.find("..");
  if (sep == std::string_view::npos) {
    throw DataError("expected a date range A..B, got '" + std::string(text) + "'");
  }
  Window w{ParseDate(text.substr(0, sep)), ParseDate(text.substr(sep + 2)) + 86400};
  if (w.end <= w.start) throw DataError("empty date range '" + std::string(text) + "'");
  return w;
}

// ---------------------------------------------------------------------------

double MetricValue(const MetricsRecord& r, std::size_t index) {
  switch (index) {
    case 0:
      return r.rating_diversity;
    case 1:
      return static_cast<double>(r.slider_interactions);
    case 2:
      return r.page_view_freq;
    case 3:
      return r.login_frequency;
    case 4:
      return r.total_length;
    case 5:
      return static_cast<double>(r.num_ratings);
    case 6:
      return r.wishlist_freq;
    case 7:
      return r.avg_rating.value_or(std::numeric_limits<double>::quiet_NaN());
  }
  throw std::out_of_range("metric index");
}

double PerMonth(std::int64_t count, const Window& window) {
  return static_cast<double>(count) / (window.Days() / 30.0);
}

MetricsRecord ComputeMetrics(UserId user, std::span<const InteractionEvent> events,
                             const Window& window, const GenomeTable& genome,
                             int timeout_minutes) {
  std::vector<InteractionEvent> mine;
  for (const auto& e : events) {
    if (e.user_id == user && window.Contains(e.timestamp)) mine.push_back(e);
  }
  MetricsRecord record;
  if (mine.empty()) return record;

  const auto sessions = Sessionize(mine, timeout_minutes);
  std::int64_t logins = 0;
  std::int64_t unique_views = 0;
  std::int64_t unique_wishlist = 0;
  Timestamp length_seconds = 0;
  std::map<MovieId, double> latest_rating;  // sessions are in event order
  for (const auto& s : sessions) {
    length_seconds += s.end - s.start;
    std::set<MovieId> viewed;
    std::set<MovieId> wished;
    for (const auto& e : s.events) {
      switch (e.kind) {
        case EventKind::kLogin:
          ++logins;
          break;
        case EventKind::kSliderSet:
          ++record.slider_interactions;
          break;
        case EventKind::kPageView:
          if (e.movie_id) viewed.insert(*e.movie_id);
          break;
        case EventKind::kWishlistAdd:
          if (e.movie_id) wished.insert(*e.movie_id);
          break;
        case EventKind::kRating:
          if (e.movie_id && e.rating) latest_rating[*e.movie_id] = *e.rating;
          break;
        default:
          break;
      }
    }
    unique_views += static_cast<std::int64_t>(viewed.size());
    unique_wishlist += static_cast<std::int64_t>(wished.size());
  }

  const double session_count = static_cast<double>(sessions.size());
  record.page_view_freq = static_cast<double>(unique_views) / session_count;
  record.wishlist_freq = static_cast<double>(unique_wishlist) / session_count;
  record.login_frequency = PerMonth(logins, window);
  record.total_length = static_cast<double>(length_seconds) / 60.0;
  record.num_ratings = static_cast<std::int64_t>(latest_rating.size());
  if (!latest_rating.empty()) {
    double sum = 0.0;
    std::vector<MovieId> rated;
    for (const auto& [movie, value] : latest_rating) {
      sum += value;
      rated.push_back(movie);
    }
    record.avg_rating = sum / static_cast<double>(latest_rating.size());
    if (auto d = MovieListDiversity(rated, genome)) record.rating_diversity = d->value;
  }
  return record;
}

std::map<UserId, MetricsRecord> ComputeAllMetrics(std::span<const UserId> users,
                                                  std::span<const InteractionEvent> events,
                                                  const Window& window,
                                                  const GenomeTable& genome,
                                                  int timeout_minutes) {
  // Bucket once instead of rescanning the log per user.
  std::map<UserId, std::vector<InteractionEvent>> by_user;
  for (UserId u : users) by_user[u];
  for (const auto& e : events) {
    auto it = by_user.find(e.user_id);
    if (it != by_user.end()) it->second.push_back(e);
  }
  std::map<UserId, MetricsRecord> out;
  for (const auto& [user, list] : by_user) {
    out[user] = ComputeMetrics(user, list, window, genome, timeout_minutes);
  }
  return out;
}

// ---------------------------------------------------------------------------

void WriteCohorts(std::span<const CohortRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "user_id,score,cohort\n";
  for (const auto& r : rows) {
    out << r.user_id << ',' << csv::FormatDouble(r.score) << ',' << CohortName(r.cohort)
        << '\n';
  }
}

std::vector<CohortRow> ReadCohorts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  csv::ExpectHeader(in, "user_id,score,cohort", path.string());
  std::vector<CohortRow> rows;
  std::set<UserId> seen;
  std::string line;
  long line_no = 1;
  while (csv::ReadLine(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::SplitRecord(line);
    if (f.size() != 3) throw DataError("malformed cohort row", line_no);
    CohortRow row{csv::ParseInt(f[0], line_no), csv::ParseDouble(f[1], line_no),
                  ParseCohort(f[2])};
    if (!seen.insert(row.user_id).second) {
      throw DataError("user listed in more than one cohort row", line_no);
    }
    rows.push_back(row);
  }
  return rows;
}

void WriteArms(const std::map<UserId, Arm>& arms, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "user_id,cohort,treatment\n";
  for (const auto& [user, arm] : arms) {
    out << user << ',' << CohortName(arm.cohort) << ',' << TreatmentName(arm.treatment)
        << '\n';
  }
}

std::map<UserId, Arm> ReadArms(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  csv::ExpectHeader(in, "user_id,cohort,treatment", path.string());
  std::map<UserId, Arm> arms;
  std::string line;
  long line_no = 1;
  while (csv::ReadLine(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::SplitRecord(line);
    if (f.size() != 3) throw DataError("malformed arm row", line_no);
    const UserId user = csv::ParseInt(f[0], line_no);
    if (!arms.emplace(user, Arm{ParseCohort(f[1]), ParseTreatment(f[2])}).second) {
      throw DataError("user assigned to more than one arm", line_no);
    }
  }
  return arms;
}

}  // namespace divrec
