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

#include "divrec/recommender.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "divrec/model_store.h"
#include "divrec/simulator.h"
#include "test_support.h"

namespace divrec {
namespace {

using testing::DenseRatings;

std::vector<RatingEvent> FromDense(const DenseRatings& d) {
  std::vector<RatingEvent> out;
  for (std::size_t u = 0; u < d.r.size(); ++u) {
    for (std::size_t i = 0; i < d.r[u].size(); ++i) {
      if (!std::isnan(d.r[u][i])) {
        out.push_back({static_cast<UserId>(u + 1), static_cast<MovieId>(i + 1), d.r[u][i], 0});
      }
    }
  }
  return out;
}

const double X = std::nan("");

DenseRatings Fixture4x4() { return {{{5, 3, 4, X}, {3, 1, 2, 3}, {4, 3, 4, 3}, {3, 3, 1, 5}}}; }

// --- popularity -------------------------------------------------------------

TEST(PopularityTest, MovieMeanAndGlobalFallback) {
  const std::vector<RatingEvent> r = {{1, 10, 4.0, 0}, {2, 10, 5.0, 0}, {1, 20, 1.0, 0}};
  const PopularityModel m = TrainPopularity(r);
  EXPECT_DOUBLE_EQ(m.Predict(99, 10).score, 4.5);
  EXPECT_DOUBLE_EQ(m.Predict(1, 30).score, 10.0 / 3.0);
  EXPECT_FALSE(m.Predict(1, 30).fallback);
}

TEST(PopularityTest, FiveMovieFixtureMatchesRecomputation) {
  const std::vector<RatingEvent> r = {{1, 1, 4.0, 0}, {2, 1, 3.5, 0}, {3, 1, 5.0, 0},
                                      {1, 2, 2.0, 0}, {2, 3, 0.5, 0}, {3, 3, 1.5, 0},
                                      {1, 4, 3.0, 0}, {2, 4, 3.0, 0}, {1, 5, 4.5, 0}};
  const PopularityModel m = TrainPopularity(r);
  std::map<MovieId, std::pair<double, int>> sums;
  for (const auto& e : r) {
    sums[e.movie_id].first += e.rating;
    sums[e.movie_id].second += 1;
  }
  for (const auto& [movie, s] : sums) {
    EXPECT_NEAR(m.Predict(1, movie).score, s.first / s.second, 1e-12);
  }
}

TEST(PopularityTest, EmptyIsError) {
  EXPECT_THROW(TrainPopularity({}), std::invalid_argument);
}

// --- item-item ----------------------------------------------------------------

TEST(ItemItemTest, SimilaritiesMatchOracle) {
  const DenseRatings d = Fixture4x4();
  const ItemItemModel m = TrainItemItem(FromDense(d));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      EXPECT_NEAR(m.Similarity(i + 1, j + 1), testing::OracleItemCosine(d, i, j), 1e-9)
          << i << "," << j;
    }
  }
}

TEST(ItemItemTest, PredictionsMatchOracle) {
  const DenseRatings d = Fixture4x4();
  const ItemItemModel m = TrainItemItem(FromDense(d));
  for (std::size_t u = 0; u < 4; ++u) {
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_NEAR(m.Predict(u + 1, i + 1).score, testing::OracleItemItemPredict(d, u, i), 1e-9);
    }
  }
}

TEST(ItemItemTest, IdenticalCenteredVectorsHaveSimilarityOne) {
  // Items 1 and 2 receive the same centered rating from every user.
  const DenseRatings d{{{5, 5, 1}, {2, 2, 4}, {4, 4, 2}}};
  const ItemItemModel m = TrainItemItem(FromDense(d));
  EXPECT_NEAR(m.Similarity(1, 2), 1.0, 1e-12);
}

TEST(ItemItemTest, NoCommonRaterMeansNoEdge) {
  const DenseRatings d{{{5, X, 3}, {X, 4, 2}}};
  const ItemItemModel m = TrainItemItem(FromDense(d));
  const auto& n = m.NeighborsOf(1);
  EXPECT_TRUE(std::none_of(n.begin(), n.end(), [](const Neighbor& x) { return x.movie_id == 2; }));
}

TEST(ItemItemTest, NeighborhoodIsTruncated) {
  SyntheticCorpusConfig config;
  config.users = 40;
  config.movies = 60;
  config.dim = 4;
  config.clusters = 3;
  config.ratings_per_user = 30;
  const auto corpus = MakeSyntheticCorpus(config).corpus;
  const ItemItemModel m = TrainItemItem(corpus.ratings(), 5);
  for (const auto& [movie, list] : m.state().neighbors) {
    EXPECT_LE(list.size(), 5u);
    EXPECT_TRUE(std::is_sorted(list.begin(), list.end(), [](const auto& a, const auto& b) {
      return a.similarity > b.similarity;
    }));
  }
}

TEST(ItemItemTest, UnknownUserFallsBackToPopularity) {
  const ItemItemModel m = TrainItemItem(FromDense(Fixture4x4()));
  const Prediction p = m.Predict(42, 1);
  EXPECT_TRUE(p.fallback);
  EXPECT_DOUBLE_EQ(p.score, (5.0 + 3 + 4 + 3) / 4);
}

// --- FunkSVD ------------------------------------------------------------------

TEST(FunkSvdTest, RankOneFullyObservedFitsTraining) {
  std::vector<RatingEvent> r;
  for (int u = 1; u <= 30; ++u) {
    for (int i = 1; i <= 40; ++i) {
      const double pu = 0.5 + 0.04 * u;
      const double qi = 0.6 + 0.03 * i;
      r.push_back({u, i, 1.0 + pu * qi, 0});
    }
  }
  const FunkSvdModel m = TrainFunkSvd(r, {.features = 5, .epochs_per_feature = 300});
  double se = 0;
  for (const auto& e : r) {
    const double d = m.Predict(e.user_id, e.movie_id).score - e.rating;
    se += d * d;
  }
  EXPECT_LT(std::sqrt(se / r.size()), 0.05);
}

TEST(FunkSvdTest, SameSeedIsBitIdentical) {
  const auto split = testing::MakeLowRankSplit(30, 50, 2, 0.1, 0.0, 3);
  const FunkSvdConfig c{.features = 6, .epochs_per_feature = 20, .seed = 12};
  const FunkSvdModel a = TrainFunkSvd(split.train, c);
  const FunkSvdModel b = TrainFunkSvd(split.train, c);
  EXPECT_EQ(a.state().user_factors, b.state().user_factors);
  EXPECT_EQ(a.state().item_factors, b.state().item_factors);
  EXPECT_EQ(a.state().user_bias, b.state().user_bias);
  EXPECT_EQ(a.state().item_bias, b.state().item_bias);
}

TEST(FunkSvdTest, HeldOutRmseOnRankThree) {
  const auto split = testing::MakeLowRankSplit(100, 200, 3, 0.1, 0.2, 7);
  const FunkSvdModel m = TrainFunkSvd(split.train);
  EXPECT_EQ(m.features(), 50);
  double se = 0;
  for (const auto& e : split.holdout) {
    const double d = m.Predict(e.user_id, e.movie_id).score - e.rating;
    se += d * d;
  }
  EXPECT_LE(std::sqrt(se / split.holdout.size()), 0.15);
}

TEST(FunkSvdTest, PredictionsAreClamped) {
  FunkSvdModel::State s;
  s.global_mean = 5.0;
  s.users = {1};
  s.movies = {1, 2};
  s.user_bias = {0.4};
  s.item_bias = {0.3, -6.0};
  s.user_factors = DenseMatrix(1, 1, 0.0);
  s.item_factors = DenseMatrix(2, 1, 0.0);
  s.popularity = TrainPopularity(std::vector<RatingEvent>{{1, 1, 5.0, 0}});
  const FunkSvdModel m(s);
  EXPECT_DOUBLE_EQ(m.RawScore(1, 1), 5.7);
  EXPECT_EQ(m.Predict(1, 1).score, 5.0);
  EXPECT_EQ(m.Predict(1, 2).score, 0.5);
  EXPECT_TRUE(m.Predict(7, 1).fallback);
}

TEST(FunkSvdTest, FeatureTrainingReducesObjective) {
  const auto split = testing::MakeLowRankSplit(40, 60, 3, 0.1, 0.0, 5);
  FunkSvdTrace trace;
  TrainFunkSvd(split.train, {.features = 4, .epochs_per_feature = 60}, &trace);
  ASSERT_EQ(trace.size(), 5u);
  for (const auto& f : trace) {
    ASSERT_EQ(f.size(), 60u);
    EXPECT_LE(f.back(), f.front());
  }
  // Each feature starts from where the previous one left off, give or take
  // the regularization of the fresh factors.
  EXPECT_LT(trace[3].back(), trace[1].front());
}

TEST(FunkSvdTest, RejectsBadConfig) {
  const std::vector<RatingEvent> r = {{1, 1, 3.0, 0}};
  EXPECT_THROW(TrainFunkSvd({}), std::invalid_argument);
  EXPECT_THROW(TrainFunkSvd(r, {.features = 0}), std::invalid_argument);
}

TEST(AlgorithmTest, NamesRoundTrip) {
  for (Algorithm a : {Algorithm::kPeasant, Algorithm::kWarrior, Algorithm::kWizard}) {
    EXPECT_EQ(ParseAlgorithm(AlgorithmName(a)), a);
  }
  EXPECT_THROW(ParseAlgorithm("druid"), std::invalid_argument);
}

// --- top-N --------------------------------------------------------------------

class TopNTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SyntheticCorpusConfig config;
    config.users = 60;
    config.movies = 1500;
    config.dim = 4;
    config.clusters = 6;
    config.ratings_per_user = 40;
    config.seed = 21;
    corpus_ = MakeSyntheticCorpus(config).corpus;
    model_ = std::make_unique<FunkSvdModel>(
        TrainFunkSvd(corpus_.ratings(), {.features = 6, .epochs_per_feature = 30}));
    for (const auto& m : corpus_.movies()) universe_.push_back(m.movie_id);
  }

  Corpus corpus_;
  std::unique_ptr<FunkSvdModel> model_;
  std::vector<MovieId> universe_;
};

TEST_F(TopNTest, SingleIsArgmax) {
  const auto exclude = RatedMovies(corpus_.ratings(), 3);
  const TopNResult r = TopN(*model_, 3, 1, universe_, exclude);
  ASSERT_EQ(r.items.size(), 1u);
  double best = -1;
  MovieId arg = 0;
  for (MovieId m : universe_) {
    if (exclude.count(m)) continue;
    const double s = model_->Predict(3, m).score;
    if (s > best) {
      best = s;
      arg = m;
    }
  }
  EXPECT_EQ(r.items[0].movie_id, arg);
}

TEST_F(TopNTest, SixHundredMatchExhaustiveOracle) {
  for (UserId u : {1, 17, 42}) {
    const auto exclude = RatedMovies(corpus_.ratings(), u);
    std::vector<ScoredCandidate> all;
    for (MovieId m : universe_) {
      if (!exclude.count(m)) all.push_back({m, model_->Predict(u, m).score});
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
      return a.score > b.score;  // universe is ascending, so ties stay by id
    });
    all.resize(600);
    const TopNResult r = TopN(*model_, u, 600, universe_, exclude);
    EXPECT_EQ(r.items, all);
    EXPECT_FALSE(r.short_list);
    EXPECT_EQ(TopN(*model_, u, 600, universe_, exclude).items, r.items);
  }
}

TEST_F(TopNTest, EverythingRatedGivesEmptyFlaggedList) {
  const std::unordered_set<MovieId> all(universe_.begin(), universe_.end());
  const TopNResult r = TopN(*model_, 1, 10, universe_, all);
  EXPECT_TRUE(r.items.empty());
  EXPECT_TRUE(r.short_list);
}

TEST_F(TopNTest, UnknownUserIsFlaggedFallback) {
  const TopNResult r = TopN(*model_, 100000, 5, universe_, {});
  EXPECT_TRUE(r.fallback);
  EXPECT_EQ(r.items.size(), 5u);
  EXPECT_THROW(TopN(*model_, 1, 0, universe_, {}), std::invalid_argument);
}

// --- model store --------------------------------------------------------------

TEST_F(TopNTest, SnapshotsPredictIdentically) {
  testing::TempDir dir;
  std::vector<std::unique_ptr<Recommender>> models;
  models.push_back(std::make_unique<PopularityModel>(TrainPopularity(corpus_.ratings())));
  models.push_back(std::make_unique<ItemItemModel>(TrainItemItem(corpus_.ratings())));
  models.push_back(std::make_unique<FunkSvdModel>(*model_));
  for (const auto& m : models) {
    const auto path = RecommenderPath(dir.path(), m->algorithm());
    SaveRecommender(*m, path);
    const auto loaded = LoadRecommender(path);
    ASSERT_EQ(loaded->algorithm(), m->algorithm());
    for (UserId u : {1, 5, 999}) {
      for (MovieId mv : {1, 2, 50, 1499}) {
        EXPECT_EQ(loaded->Predict(u, mv).score, m->Predict(u, mv).score);
      }
    }
  }
}

TEST(ModelStoreTest, RejectsUnknownSchema) {
  testing::TempDir dir;
  testing::WriteText(dir / "m.json", R"({"schema_version": 99, "kind": "peasant"})");
  EXPECT_THROW(LoadRecommender(dir / "m.json"), DataError);
  testing::WriteText(dir / "n.json", "not json");
  EXPECT_THROW(LoadRecommender(dir / "n.json"), DataError);
  EXPECT_THROW(LoadRecommender(dir / "absent.json"), DataError);
}

TEST(ModelStoreTest, ClusterModelRoundTrip) {
  const auto mix = testing::MakeMixture(3, 10, 4, 5.0, 0.5, 2);
  ClusterModel m = KMeans(mix.points, mix.ids, {.k = 3, .seed = 1});
  m.SetRatingCounts({4, 5, 6});
  testing::TempDir dir;
  SaveClusterModel(m, ClusterModelPath(dir.path()));
  const ClusterModel back = LoadClusterModel(ClusterModelPath(dir.path()));
  EXPECT_EQ(back.centroids(), m.centroids());
  EXPECT_EQ(back.movies(), m.movies());
  EXPECT_EQ(back.assignment(), m.assignment());
  EXPECT_EQ(back.rating_counts(), m.rating_counts());
  EXPECT_EQ(back.objective_history(), m.objective_history());
}

}  // namespace
}  // namespace divrec
