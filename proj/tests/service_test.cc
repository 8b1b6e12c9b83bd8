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

#include <gtest/gtest.h>

#include <set>

#include "service_fixture.h"
#include "test_support.h"

namespace divrec {
namespace {

using testing::ServiceWorld;

int StatusOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e.status();
  }
  return 200;
}

class ServiceTest : public ::testing::Test {
 protected:
  ServiceTest()
      : world_(ServiceWorld::Get()),
        service_(world_.engine, world_.arms, &log_, {}, [this] { return now_; }) {}

  std::string Login(Cohort c, Treatment t) {
    return service_.StartSession(world_.UserFor(c, t)).token;
  }

  const ServiceWorld& world_;
  Timestamp now_ = 1667520000;
  EventLog log_;
  RecommenderService service_;
};

TEST_F(ServiceTest, InfoMessagePerArmUntilAcknowledged) {
  EXPECT_NE(InfoMessage(Treatment::kBrcDs).find("slider bar"), std::string::npos);
  EXPECT_NE(InfoMessage(Treatment::kBrc).find("new carousel"), std::string::npos);
  EXPECT_NE(InfoMessage(Treatment::kControl), InfoMessage(Treatment::kBrc));
  for (const auto& [user, arm] : world_.arms) {
    const SessionStart s = service_.StartSession(user);
    ASSERT_TRUE(s.info_message.has_value());
    EXPECT_EQ(*s.info_message, InfoMessage(arm.treatment));
    EXPECT_EQ(s.arm, arm);
    EXPECT_EQ(service_.StartSession(user).info_message, s.info_message);  // not yet acked
    service_.Acknowledge(s.token);
    EXPECT_FALSE(service_.StartSession(user).info_message.has_value());
  }
}

TEST_F(ServiceTest, AuthenticationErrors) {
  EXPECT_EQ(StatusOf([&] { service_.StartSession(999); }), 404);
  EXPECT_EQ(StatusOf([&] { service_.Home("nope"); }), 401);
  const std::string t = Login(Cohort::kDiverse, Treatment::kBrc);
  now_ += 29 * 60;
  EXPECT_EQ(StatusOf([&] { service_.Home(t); }), 200);  // refreshes last_seen
  now_ += 30 * 60;
  EXPECT_EQ(StatusOf([&] { service_.Home(t); }), 401);
  EXPECT_EQ(StatusOf([&] { service_.Home(t); }), 401);
  const std::string u = Login(Cohort::kDiverse, Treatment::kBrc);
  service_.Logout(u);
  EXPECT_EQ(StatusOf([&] { service_.Home(u); }), 401);
  EXPECT_NE(t, u);
}

TEST_F(ServiceTest, ArmGating) {
  const std::string control = Login(Cohort::kNonDiverse, Treatment::kControl);
  const std::string brc = Login(Cohort::kNonDiverse, Treatment::kBrc);
  const std::string ds = Login(Cohort::kNonDiverse, Treatment::kBrcDs);
  EXPECT_EQ(StatusOf([&] { service_.Broad(control, 1); }), 403);
  EXPECT_EQ(StatusOf([&] { service_.SetLevel(control, 2); }), 403);
  EXPECT_EQ(StatusOf([&] { service_.SetLevel(brc, 2); }), 403);
  EXPECT_EQ(StatusOf([&] { service_.SetLevel(ds, 2); }), 200);
  EXPECT_EQ(StatusOf([&] { service_.RecordEvent(control, EventKind::kCarouselClick, {}); }), 403);

  const HomeView hc = service_.Home(control);
  EXPECT_FALSE(hc.broad.has_value());
  EXPECT_FALSE(hc.level.has_value());
  EXPECT_EQ(hc.top_picks.size(), static_cast<std::size_t>(kPageSize));
  const HomeView hb = service_.Home(brc);
  EXPECT_TRUE(hb.broad.has_value());
  EXPECT_FALSE(hb.level.has_value());
  EXPECT_EQ(service_.Home(ds).level, 2);
}

TEST_F(ServiceTest, OnlyThreePagesAreReranked) {
  const std::string t = Login(Cohort::kDiverse, Treatment::kBrcDs);
  for (int page : {0, 4, 10}) {
    try {
      service_.Broad(t, page);
      ADD_FAILURE() << page;
    } catch (const ServiceError& e) {
      EXPECT_EQ(e.status(), 400);
      EXPECT_STREQ(e.what(), "only the first 3 pages are re-ranked");
    }
  }
  std::set<MovieId> seen;
  for (int page = 1; page <= 3; ++page) {
    const RecPage p = service_.Broad(t, page);
    EXPECT_EQ(p.page_index, page);
    for (const auto& s : p.slots) EXPECT_TRUE(seen.insert(s.movie_id).second);
  }
}

TEST_F(ServiceTest, LevelDefaultsPerSessionAndRefreshesPageOne) {
  const std::string t = Login(Cohort::kDiverse, Treatment::kBrcDs);
  EXPECT_EQ(service_.Session(t).level, 3);
  const RecPage before = service_.Broad(t, 1);
  const LevelChange c = service_.SetLevel(t, 1);
  EXPECT_EQ(c.level, 1);
  EXPECT_EQ(c.page, service_.Broad(t, 1));
  EXPECT_NE(c.page, before);
  std::set<int> clusters;
  for (const auto& s : c.page.slots) clusters.insert(s.cluster_id);
  EXPECT_LE(clusters.size(), 5u);
  EXPECT_EQ(StatusOf([&] { service_.SetLevel(t, 6); }), 400);
  EXPECT_EQ(StatusOf([&] { service_.SetLevel(t, 0); }), 400);
  EXPECT_EQ(service_.Session(t).level, 1);

  const std::string fresh = Login(Cohort::kDiverse, Treatment::kBrcDs);
  EXPECT_EQ(service_.Session(fresh).level, 3);
}

TEST_F(ServiceTest, BroadestLevelCoversEveryCluster) {
  const std::string t = Login(Cohort::kNonDiverse, Treatment::kBrcDs);
  const RecPage p = service_.SetLevel(t, 5).page;
  std::set<int> clusters;
  for (const auto& s : p.slots) clusters.insert(s.cluster_id);
  EXPECT_EQ(p.slots.size(), static_cast<std::size_t>(kPageSize));
  EXPECT_EQ(clusters.size(), 24u);
}

TEST_F(ServiceTest, BrcPagesEqualTheBroadestSliderPages) {
  // Same candidate pool needs the same user; build a second service where
  // that user is in BRC_DS.
  const UserId user = world_.UserFor(Cohort::kDiverse, Treatment::kBrc);
  std::map<UserId, Arm> arms = world_.arms;
  arms[user].treatment = Treatment::kBrcDs;
  EventLog other_log;
  RecommenderService other(world_.engine, arms, &other_log, {}, [this] { return now_; });
  const std::string brc = service_.StartSession(user).token;
  const std::string ds = other.StartSession(user).token;
  other.SetLevel(ds, 5);
  for (int page = 1; page <= 3; ++page) EXPECT_EQ(service_.Broad(brc, page), other.Broad(ds, page));
}

TEST_F(ServiceTest, RatingsAndWishlist) {
  const std::string t = Login(Cohort::kDiverse, Treatment::kControl);
  const UserId user = world_.UserFor(Cohort::kDiverse, Treatment::kControl);
  const MovieId top = service_.Home(t).top_picks.front().movie_id;
  service_.Rate(t, top, 4.5);
  ASSERT_EQ(service_.StoredRatings().size(), 1u);
  EXPECT_EQ(service_.StoredRatings()[0].rating, 4.5);
  EXPECT_EQ(StatusOf([&] { service_.Rate(t, top, 4.25); }), 400);
  EXPECT_EQ(StatusOf([&] { service_.Rate(t, top, 0.0); }), 400);
  for (const auto& c : service_.Home(t).top_picks) EXPECT_NE(c.movie_id, top);  // now rated

  EXPECT_TRUE(service_.AddToWishlist(t, 7));
  EXPECT_FALSE(service_.AddToWishlist(t, 7));
  EXPECT_EQ(service_.Wishlist(user), (std::set<MovieId>{7}));
  EXPECT_EQ(StatusOf([&] { service_.RecordEvent(t, EventKind::kPageView, {}); }), 400);
  EXPECT_EQ(StatusOf([&] { service_.RecordEvent(t, EventKind::kRating, 3); }), 400);
}

TEST_F(ServiceTest, OneEventPerSuccessfulMutation) {
  const std::string t = Login(Cohort::kNonDiverse, Treatment::kBrcDs);
  std::size_t n = log_.size();
  EXPECT_EQ(n, 1u);
  // `ok`: the call succeeds and logs `kind`; otherwise it must log nothing.
  auto expect_logged = [&](EventKind kind, const std::function<void()>& f, bool ok,
                           int status = -1) {
    EXPECT_EQ(StatusOf(f), status >= 0 ? status : ok ? 200 : 400);
    if (ok) {
      ASSERT_EQ(log_.size(), n + 1);
      EXPECT_EQ(log_.Snapshot().back().kind, kind);
      EXPECT_EQ(log_.Snapshot().back().token, t);
      EXPECT_EQ(log_.Snapshot().back().timestamp, now_);
    }
    EXPECT_EQ(log_.size(), n + (ok ? 1 : 0));
    n = log_.size();
  };
  expect_logged(EventKind::kInfoAck, [&] { service_.Acknowledge(t); }, true);
  expect_logged(EventKind::kSliderSet, [&] { service_.SetLevel(t, 3); }, true);
  expect_logged(EventKind::kSliderSet, [&] { service_.SetLevel(t, 3); }, true);  // same level
  expect_logged(EventKind::kSliderSet, [&] { service_.SetLevel(t, 9); }, false);
  expect_logged(EventKind::kRating, [&] { service_.Rate(t, 5, 3.0); }, true);
  expect_logged(EventKind::kRating, [&] { service_.Rate(t, 5, 3.3); }, false);
  expect_logged(EventKind::kWishlistAdd, [&] { service_.AddToWishlist(t, 5); }, true);
  expect_logged(EventKind::kWishlistAdd, [&] { service_.AddToWishlist(t, 5); }, true);
  expect_logged(EventKind::kPageView, [&] { service_.RecordEvent(t, EventKind::kPageView, 5); },
                true);
  expect_logged(EventKind::kCarouselClick,
                [&] { service_.RecordEvent(t, EventKind::kCarouselClick, {}); }, true);
  EXPECT_EQ(log_.Snapshot().back().treatment, Treatment::kBrcDs);
  // Reads succeed without logging.
  expect_logged(EventKind::kLogin, [&] { service_.Home(t); }, false, 200);
  expect_logged(EventKind::kLogin, [&] { service_.Broad(t, 2); }, false, 200);
  expect_logged(EventKind::kLogout, [&] { service_.Logout(t); }, true);
  EXPECT_TRUE(ValidateEvents(log_.Snapshot(), world_.arms).empty());
}

TEST_F(ServiceTest, EventLogMirrorsToFile) {
  testing::TempDir dir;
  {
    EventLog file_log(dir / "events.jsonl");
    RecommenderService s(world_.engine, world_.arms, &file_log, {}, [this] { return now_; });
    const std::string t = s.StartSession(1).token;
    s.AddToWishlist(t, 3);
    EXPECT_EQ(ReadEventLog(dir / "events.jsonl"), file_log.Snapshot());
  }
  EXPECT_EQ(testing::CountLines(dir / "events.jsonl"), 2u);
}

TEST_F(ServiceTest, SwapEngineTakesEffect) {
  const std::string t = Login(Cohort::kDiverse, Treatment::kControl);
  const auto before = service_.Home(t).top_picks;
  auto pop = std::make_shared<PopularityModel>(TrainPopularity(world_.corpus.ratings()));
  service_.SwapEngine(MakeEngine(pop, world_.engine->clusters, world_.corpus.ratings()));
  EXPECT_EQ(service_.engine()->model.get(), pop.get());
  EXPECT_NE(service_.Home(t).top_picks, before);
  EXPECT_THROW(service_.SwapEngine(nullptr), std::invalid_argument);
}

}  // namespace
}  // namespace divrec
