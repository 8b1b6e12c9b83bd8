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

#ifndef DIVREC_SERVICE_H_
#define DIVREC_SERVICE_H_

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "divrec/clustering.h"
#include "divrec/experiment.h"
#include "divrec/recommender.h"
#include "divrec/rerank.h"

namespace divrec {

// Error carrying the HTTP status the facade should answer with.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// Info window text shown after login, per treatment.
std::string InfoMessage(Treatment treatment);

// Append-only interaction log. Optionally mirrors every line to a JSON-lines
// file.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(const std::filesystem::path& path);

  void Append(const InteractionEvent& event);
  std::vector<InteractionEvent> Snapshot() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<InteractionEvent> events_;
  std::ofstream file_;
};

// Immutable recommendation data; swapped as a whole on retrain.
struct Engine {
  std::shared_ptr<const Recommender> model;
  ClusterModel clusters;
  std::vector<MovieId> universe;  // clustered movies, ascending
  std::unordered_map<UserId, std::unordered_set<MovieId>> rated;
};

std::shared_ptr<const Engine> MakeEngine(std::shared_ptr<const Recommender> model,
                                         ClusterModel clusters,
                                         std::span<const RatingEvent> training_ratings);

struct ServiceConfig {
  std::size_t pool_size = kDefaultPoolSize;
  int session_timeout_minutes = kDefaultSessionTimeoutMinutes;
  std::uint64_t token_seed = 0;
};

struct SessionState {
  std::string token;
  UserId user_id = 0;
  Arm arm;
  int level = DiversityLevel::kSessionDefault;
  Timestamp last_seen = 0;
};

struct SessionStart {
  std::string token;
  Arm arm;
  int level = DiversityLevel::kSessionDefault;
  std::optional<std::string> info_message;
};

struct HomeView {
  Arm arm;
  std::vector<ScoredCandidate> top_picks;  // base ranking, first page
  std::optional<RecPage> broad;            // BRC and BRC_DS only
  std::optional<int> level;                // BRC_DS only
  bool fallback = false;                   // user unknown to the model
};

struct LevelChange {
  int level = DiversityLevel::kSessionDefault;
  RecPage page;  // refreshed page 1
};

class RecommenderService {
 public:
  using Clock = std::function<Timestamp()>;

  RecommenderService(std::shared_ptr<const Engine> engine, std::map<UserId, Arm> arms,
                     EventLog* log, ServiceConfig config = {}, Clock clock = SystemClock);

  // POST /session. Throws ServiceError(404) for users without an arm.
  SessionStart StartSession(UserId user);
  // POST /ack. Records the info window acknowledgment.
  void Acknowledge(const std::string& token);
  // GET /home.
  HomeView Home(const std::string& token);
  // GET /broad. Throws 403 for Control, 400 for pages outside 1..3.
  RecPage Broad(const std::string& token, int page);
  // POST /level. BRC_DS only; 400 outside 1..5.
  LevelChange SetLevel(const std::string& token, int level);
  // POST /rating. 400 off the half-star grid.
  void Rate(const std::string& token, MovieId movie, double rating);
  // POST /wishlist. Returns false when the movie was already listed.
  bool AddToWishlist(const std::string& token, MovieId movie);
  // POST /event for client-side signals: page_view, carousel_click.
  void RecordEvent(const std::string& token, EventKind kind, std::optional<MovieId> movie);
  // POST /logout.
  void Logout(const std::string& token);

  SessionState Session(const std::string& token) const;
  std::vector<RatingEvent> StoredRatings() const;
  std::set<MovieId> Wishlist(UserId user) const;

  void SwapEngine(std::shared_ptr<const Engine> engine);
  std::shared_ptr<const Engine> engine() const;

  static Timestamp SystemClock();

 private:
  // Validates and refreshes the session; 401 for unknown or expired tokens.
  SessionState Touch(const std::string& token);
  std::vector<RecPage> Pages(const Engine& engine, const SessionState& s, int level) const;
  TopNResult Candidates(const Engine& engine, UserId user, std::size_t n) const;
  void Log(const SessionState& s, InteractionEvent e);

  mutable std::mutex engine_mu_;
  std::shared_ptr<const Engine> engine_;
  const std::map<UserId, Arm> arms_;
  EventLog* log_;
  ServiceConfig config_;
  Clock clock_;

  mutable std::mutex mu_;
  std::unordered_map<std::string, SessionState> sessions_;
  std::set<UserId> acknowledged_;
  std::map<UserId, std::set<MovieId>> wishlists_;
  std::vector<RatingEvent> ratings_;
  std::uint64_t token_counter_ = 0;
};

}  // namespace divrec

#endif  // DIVREC_SERVICE_H_
