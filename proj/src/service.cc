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

#include "divrec/service.h"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "divrec/random.h"

namespace divrec {
namespace {

constexpr const char* kInfoPreamble =
    "Dear MovieLens user, we're experimenting with changes related to the movies we show "
    "users, particularly -- ";

}  // namespace

std::string InfoMessage(Treatment treatment) {
  switch (treatment) {
    case Treatment::kBrc:
      return std::string(kInfoPreamble) +
             "a new carousel that you can find above the top picks carousel on the home page. "
             "You may see different content than you're used to.";
    case Treatment::kBrcDs:
      return std::string(kInfoPreamble) +
             "a new page with a slider bar control that you can enter by clicking the carousel "
             "header or \"adjust\" button next to the top carousel. You will see 5 levels of "
             "diversity to toggle with.";
    case Treatment::kControl:
      return std::string(kInfoPreamble) +
             "the top-picks carousel. You may see different content than you're used to.";
  }
  return kInfoPreamble;
}

// ---------------------------------------------------------------------------

EventLog::EventLog(const std::filesystem::path& path) : file_(path, std::ios::app) {
  if (!file_) throw DataError("cannot open event log " + path.string());
}

void EventLog::Append(const InteractionEvent& event) {
  std::lock_guard lock(mu_);
  events_.push_back(event);
  if (file_.is_open()) file_ << ToJsonLine(event) << '\n' << std::flush;
}

std::vector<InteractionEvent> EventLog::Snapshot() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::size_t EventLog::size() const {
  std::lock_guard lock(mu_);
  return events_.size();
}

// ---------------------------------------------------------------------------

std::shared_ptr<const Engine> MakeEngine(std::shared_ptr<const Recommender> model,
                                         ClusterModel clusters,
                                         std::span<const RatingEvent> training_ratings) {
  auto engine = std::make_shared<Engine>();
  engine->model = std::move(model);
  engine->universe = clusters.movies();
  std::sort(engine->universe.begin(), engine->universe.end());
  engine->clusters = std::move(clusters);
  for (const auto& r : training_ratings) engine->rated[r.user_id].insert(r.movie_id);
  return engine;
}

RecommenderService::RecommenderService(std::shared_ptr<const Engine> engine,
                                       std::map<UserId, Arm> arms, EventLog* log,
                                       ServiceConfig config, Clock clock)
    : engine_(std::move(engine)),
      arms_(std::move(arms)),
      log_(log),
      config_(config),
      clock_(std::move(clock)) {
  if (!engine_) throw std::invalid_argument("service needs an engine");
  if (!log_) throw std::invalid_argument("service needs an event log");
}

Timestamp RecommenderService::SystemClock() {
  using namespace std::chrono;
  return duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
}

void RecommenderService::SwapEngine(std::shared_ptr<const Engine> engine) {
  if (!engine) throw std::invalid_argument("null engine");
  std::lock_guard lock(engine_mu_);
  engine_ = std::move(engine);
}

std::shared_ptr<const Engine> RecommenderService::engine() const {
  std::lock_guard lock(engine_mu_);
  return engine_;
}

void RecommenderService::Log(const SessionState& s, InteractionEvent e) {
  e.user_id = s.user_id;
  e.token = s.token;
  e.timestamp = clock_();
  log_->Append(e);
}

SessionState RecommenderService::Touch(const std::string& token) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(token);
  if (it == sessions_.end()) throw ServiceError(401, "unknown session token");
  const Timestamp now = clock_();
  if (now - it->second.last_seen >= static_cast<Timestamp>(config_.session_timeout_minutes) * 60) {
    sessions_.erase(it);
    throw ServiceError(401, "session expired");
  }
  it->second.last_seen = now;
  return it->second;
}

SessionState RecommenderService::Session(const std::string& token) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(token);
  if (it == sessions_.end()) throw ServiceError(401, "unknown session token");
  return it->second;
}

SessionStart RecommenderService::StartSession(UserId user) {
  auto arm_it = arms_.find(user);
  if (arm_it == arms_.end()) {
    throw ServiceError(404, "user " + std::to_string(user) + " is not enrolled");
  }
  SessionState s;
  s.user_id = user;
  s.arm = arm_it->second;
  s.level = DiversityLevel::kSessionDefault;
  s.last_seen = clock_();
  SessionStart out;
  {
    std::lock_guard lock(mu_);
    char buf[40];
    const std::uint64_t serial = ++token_counter_;
    std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                  static_cast<unsigned long long>(Mix64(config_.token_seed ^ Mix64(serial))),
                  static_cast<unsigned long long>(Mix64(serial + static_cast<std::uint64_t>(user))));
    s.token = buf;
    sessions_[s.token] = s;
    if (!acknowledged_.count(user)) out.info_message = InfoMessage(s.arm.treatment);
  }
  out.token = s.token;
  out.arm = s.arm;
  out.level = s.level;
  Log(s, {.kind = EventKind::kLogin});
  return out;
}

void RecommenderService::Acknowledge(const std::string& token) {
  const SessionState s = Touch(token);
  {
    std::lock_guard lock(mu_);
    acknowledged_.insert(s.user_id);
  }
  Log(s, {.kind = EventKind::kInfoAck});
}

TopNResult RecommenderService::Candidates(const Engine& engine, UserId user,
                                          std::size_t n) const {
  std::unordered_set<MovieId> exclude;
  if (auto it = engine.rated.find(user); it != engine.rated.end()) exclude = it->second;
  {
    std::lock_guard lock(mu_);
    for (const auto& r : ratings_) {
      if (r.user_id == user) exclude.insert(r.movie_id);
    }
  }
  return TopN(*engine.model, user, n, engine.universe, exclude);
}

std::vector<RecPage> RecommenderService::Pages(const Engine& engine, const SessionState& s,
                                               int level) const {
  const DiversityLevel L(level);
  const TopNResult pool = Candidates(engine, s.user_id, config_.pool_size);
  if (pool.items.empty()) throw ServiceError(409, "no unrated movies left to recommend");
  const ClusterSubset subset = SelectClusterSubset(engine.clusters, L);
  return RerankPages(pool.items, engine.clusters, subset, L);
}

HomeView RecommenderService::Home(const std::string& token) {
  const SessionState s = Touch(token);
  const auto eng = engine();
  HomeView view;
  view.arm = s.arm;
  const TopNResult top = Candidates(*eng, s.user_id, kPageSize);
  view.top_picks = top.items;
  view.fallback = top.fallback;
  if (s.arm.treatment == Treatment::kBrc) {
    view.broad = Pages(*eng, s, DiversityLevel::kMax).front();
  } else if (s.arm.treatment == Treatment::kBrcDs) {
    view.broad = Pages(*eng, s, s.level).front();
    view.level = s.level;
  }
  return view;
}

RecPage RecommenderService::Broad(const std::string& token, int page) {
  const SessionState s = Touch(token);
  if (s.arm.treatment == Treatment::kControl) {
    throw ServiceError(403, "broad recommendations are not available for this arm");
  }
  if (page < 1 || page > kRerankedPages) {
    throw ServiceError(400, "only the first 3 pages are re-ranked");
  }
  const int level = s.arm.treatment == Treatment::kBrc ? DiversityLevel::kMax : s.level;
  auto pages = Pages(*engine(), s, level);
  if (static_cast<std::size_t>(page) > pages.size()) {
    throw ServiceError(409, "candidate pool exhausted before page " + std::to_string(page));
  }
  return pages[page - 1];
}

LevelChange RecommenderService::SetLevel(const std::string& token, int level) {
  SessionState s = Touch(token);
  if (s.arm.treatment != Treatment::kBrcDs) {
    throw ServiceError(403, "the diversity slider is not available for this arm");
  }
  if (level < DiversityLevel::kMin || level > DiversityLevel::kMax) {
    throw ServiceError(400, "level must be in 1..5, got " + std::to_string(level));
  }
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(token);
    if (it == sessions_.end()) throw ServiceError(401, "session expired");
    it->second.level = level;
    s = it->second;
  }
  Log(s, {.kind = EventKind::kSliderSet, .level = level});
  return {level, Pages(*engine(), s, level).front()};
}

void RecommenderService::Rate(const std::string& token, MovieId movie, double rating) {
  const SessionState s = Touch(token);
  if (!OnHalfStarGrid(rating)) throw ServiceError(400, "rating off half-star grid");
  {
    std::lock_guard lock(mu_);
    ratings_.push_back({s.user_id, movie, rating, clock_()});
  }
  Log(s, {.kind = EventKind::kRating, .movie_id = movie, .rating = rating});
}

bool RecommenderService::AddToWishlist(const std::string& token, MovieId movie) {
  const SessionState s = Touch(token);
  bool added;
  {
    std::lock_guard lock(mu_);
    added = wishlists_[s.user_id].insert(movie).second;
  }
  Log(s, {.kind = EventKind::kWishlistAdd, .movie_id = movie});
  return added;
}

void RecommenderService::RecordEvent(const std::string& token, EventKind kind,
                                     std::optional<MovieId> movie) {
  const SessionState s = Touch(token);
  switch (kind) {
    case EventKind::kPageView:
      if (!movie) throw ServiceError(400, "page_view needs a movie_id");
      Log(s, {.kind = kind, .movie_id = movie});
      return;
    case EventKind::kCarouselClick:
      if (s.arm.treatment == Treatment::kControl) {
        throw ServiceError(403, "carousel clicks are not available for this arm");
      }
      Log(s, {.kind = kind, .treatment = s.arm.treatment});
      return;
    default:
      throw ServiceError(400, "event kind '" + std::string(EventKindName(kind)) +
                                  "' has a dedicated endpoint");
  }
}

void RecommenderService::Logout(const std::string& token) {
  const SessionState s = Touch(token);
  {
    std::lock_guard lock(mu_);
    sessions_.erase(token);
  }
  Log(s, {.kind = EventKind::kLogout});
}

std::vector<RatingEvent> RecommenderService::StoredRatings() const {
  std::lock_guard lock(mu_);
  return ratings_;
}

std::set<MovieId> RecommenderService::Wishlist(UserId user) const {
  std::lock_guard lock(mu_);
  auto it = wishlists_.find(user);
  return it == wishlists_.end() ? std::set<MovieId>{} : it->second;
}

}  // namespace divrec
