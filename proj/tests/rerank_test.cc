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

#include "divrec/rerank.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "divrec/simulator.h"
#include "test_support.h"

namespace divrec {
namespace {

// 24 random centroids; movie m belongs to cluster (m - 1) % 24.
ClusterModel MakeModel(int movies, std::uint64_t seed, std::size_t dim = 40) {
  Rng rng(seed);
  DenseMatrix centroids;
  for (int c = 0; c < 24; ++c) {
    std::vector<double> row(dim);
    for (double& x : row) x = rng.Uniform();
    centroids.AppendRow(row);
  }
  std::vector<MovieId> ids;
  std::vector<int> assignment;
  for (int m = 1; m <= movies; ++m) {
    ids.push_back(m);
    assignment.push_back((m - 1) % 24);
  }
  ClusterModel model(centroids, ids, assignment);
  std::vector<std::int64_t> counts(24);
  for (auto& c : counts) c = static_cast<std::int64_t>(rng.Below(1000));
  model.SetRatingCounts(counts);
  return model;
}

std::vector<ScoredCandidate> RandomPool(int movies, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<MovieId> ids;
  for (int m = 1; m <= movies; ++m) ids.push_back(m);
  rng.Shuffle(std::span<MovieId>(ids));
  ids.resize(n);
  std::vector<ScoredCandidate> pool;
  for (MovieId id : ids) pool.push_back({id, rng.Uniform(0.5, 5.0)});
  std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score > b.score : a.movie_id < b.movie_id;
  });
  return pool;
}

// Straightforward page builder: quota scan, then subset without quota, then
// anything, each in score order, never reusing a movie.
std::vector<std::vector<MovieId>> ReplayPages(const std::vector<ScoredCandidate>& pool,
                                              const ClusterModel& model,
                                              const std::vector<int>& subset, int level) {
  const std::set<int> in(subset.begin(), subset.end());
  const int cap = (24 + 5 * level - 1) / (5 * level);
  std::set<MovieId> taken;
  std::vector<std::vector<MovieId>> pages;
  for (int p = 0; p < 3; ++p) {
    std::vector<MovieId> page;
    std::map<int, int> count;
    for (const auto& c : pool) {
      if (page.size() == 24) break;
      const int cl = model.ClusterOf(c.movie_id);
      if (taken.count(c.movie_id) || !in.count(cl) || count[cl] >= cap) continue;
      page.push_back(c.movie_id);
      taken.insert(c.movie_id);
      ++count[cl];
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& c : pool) {
        if (page.size() == 24) break;
        if (taken.count(c.movie_id)) continue;
        if (pass == 0 && !in.count(model.ClusterOf(c.movie_id))) continue;
        page.push_back(c.movie_id);
        taken.insert(c.movie_id);
      }
    }
    pages.push_back(page);
  }
  return pages;
}

std::vector<MovieId> Ids(const RecPage& page) {
  std::vector<MovieId> out;
  for (const auto& s : page.slots) out.push_back(s.movie_id);
  return out;
}

TEST(DiversityLevelTest, Arithmetic) {
  const std::vector<int> sizes = {5, 10, 15, 20, 24};
  const std::vector<int> caps = {5, 3, 2, 2, 1};
  for (int L = 1; L <= 5; ++L) {
    const DiversityLevel level(L);
    EXPECT_EQ(level.SubsetSize(), sizes[L - 1]);
    EXPECT_EQ(level.MaxPerCluster(), caps[L - 1]);
    EXPECT_GE(level.SubsetSize() * level.MaxPerCluster(), kPageSize);
  }
  EXPECT_EQ(DiversityLevel(5).SubsetSize(10), 10);
  EXPECT_THROW(DiversityLevel(0), std::out_of_range);
  EXPECT_THROW(DiversityLevel(6), std::out_of_range);
}

TEST(ClusterSubsetTest, LevelThreeUsesFifteenAndLevelFiveAll) {
  const ClusterModel m = MakeModel(240, 1);
  EXPECT_EQ(SelectClusterSubset(m, DiversityLevel(3)).clusters.size(), 15u);
  const auto all = SelectClusterSubset(m, DiversityLevel(5)).clusters;
  EXPECT_EQ(std::set<int>(all.begin(), all.end()).size(), 24u);
}

TEST(ClusterSubsetTest, GreedyOrderMatchesOracleReplay) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ClusterModel m = MakeModel(240, seed);
    const auto oracle = testing::OracleGreedyOrder(m);
    EXPECT_EQ(GreedyClusterOrder(m), oracle);
    const auto five = SelectClusterSubset(m, DiversityLevel(1)).clusters;
    EXPECT_EQ(five, std::vector<int>(oracle.begin(), oracle.begin() + 5));
  }
}

TEST(ClusterSubsetTest, SubsetsAreNestedPrefixes) {
  const ClusterModel m = MakeModel(240, 3);
  std::vector<int> prev;
  for (int L = 1; L <= 5; ++L) {
    const auto s = SelectClusterSubset(m, DiversityLevel(L)).clusters;
    EXPECT_TRUE(std::equal(prev.begin(), prev.end(), s.begin()));
    prev = s;
  }
}

TEST(ClusterSubsetTest, SeedIsMostRated) {
  ClusterModel m = MakeModel(240, 4);
  std::vector<std::int64_t> counts(24, 10);
  counts[17] = 11;
  m.SetRatingCounts(counts);
  EXPECT_EQ(GreedyClusterOrder(m).front(), 17);
}

TEST(RerankTest, PageStructureForEveryLevel) {
  const ClusterModel m = MakeModel(2400, 5);
  const auto pool = RandomPool(2400, 600, 5);
  for (int L = 1; L <= 5; ++L) {
    const DiversityLevel level(L);
    const ClusterSubset subset = SelectClusterSubset(m, level);
    const auto pages = RerankPages(pool, m, subset, level);
    ASSERT_EQ(pages.size(), 3u);
    std::set<MovieId> seen;
    for (std::size_t p = 0; p < pages.size(); ++p) {
      EXPECT_EQ(pages[p].page_index, static_cast<int>(p + 1));
      EXPECT_EQ(pages[p].slots.size(), 24u);
      EXPECT_FALSE(pages[p].degraded);
      std::map<int, int> count;
      for (const auto& s : pages[p].slots) {
        EXPECT_TRUE(seen.insert(s.movie_id).second);
        EXPECT_TRUE(subset.Contains(s.cluster_id));
        ++count[s.cluster_id];
      }
      for (const auto& [c, n] : count) EXPECT_LE(n, level.MaxPerCluster());
      EXPECT_GE(static_cast<int>(count.size()), (24 + level.MaxPerCluster() - 1) / level.MaxPerCluster());
      if (L == 5) {
        EXPECT_EQ(count.size(), 24u);
      }
    }
  }
}

TEST(RerankTest, SixHundredCandidateOracleReplay) {
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const ClusterModel m = MakeModel(3000, seed);
    const auto pool = RandomPool(3000, 600, seed);
    for (int L = 1; L <= 5; ++L) {
      const DiversityLevel level(L);
      const ClusterSubset subset = SelectClusterSubset(m, level);
      const auto pages = RerankPages(pool, m, subset, level);
      const auto replay = ReplayPages(pool, m, subset.clusters, L);
      for (int p = 0; p < 3; ++p) EXPECT_EQ(Ids(pages[p]), replay[p]) << "L" << L << " page " << p;
    }
  }
}

TEST(RerankTest, LevelOneConstraintInactiveKeepsScoreOrder) {
  const ClusterModel m = MakeModel(240, 6);
  const ClusterSubset subset = SelectClusterSubset(m, DiversityLevel(1));
  // Top 24: five from each of the first four subset clusters plus four from
  // the fifth, then filler from everywhere.
  std::vector<ScoredCandidate> pool;
  double score = 5.0;
  for (int k = 0; k < 5; ++k) {
    const int cluster = subset.clusters[k];
    for (int i = 0; i < (k < 4 ? 5 : 4); ++i) {
      pool.push_back({cluster + 1 + 24 * i, score});
      score -= 0.01;
    }
  }
  std::set<MovieId> used;
  for (const auto& c : pool) used.insert(c.movie_id);
  for (MovieId id = 1; id <= 240; ++id) {
    if (!used.count(id)) {
      pool.push_back({id, score});
      score -= 0.001;
    }
  }
  const auto pages = RerankPages(pool, m, subset, DiversityLevel(1));
  std::vector<MovieId> top24;
  for (int i = 0; i < 24; ++i) top24.push_back(pool[i].movie_id);
  EXPECT_EQ(Ids(pages[0]), top24);
}

TEST(RerankTest, FallbackSingleClusterPool) {
  const ClusterModel m = MakeModel(24 * 40, 7);
  // 30 movies, all in cluster 0.
  std::vector<ScoredCandidate> pool;
  for (int i = 0; i < 30; ++i) pool.push_back({1 + 24 * i, 5.0 - 0.01 * i});
  const DiversityLevel level(5);
  const auto pages = RerankPages(pool, m, SelectClusterSubset(m, level), level);
  EXPECT_EQ(pages[0].slots.size(), 24u);
  EXPECT_TRUE(pages[0].degraded);
  for (const auto& s : pages[0].slots) EXPECT_EQ(s.cluster_id, 0);
  EXPECT_EQ(pages[1].slots.size(), 6u);
  EXPECT_TRUE(pages[2].slots.empty());
  EXPECT_TRUE(pages[2].degraded);
}

TEST(RerankTest, FallbackTinyPool) {
  const ClusterModel m = MakeModel(240, 8);
  const auto pool = RandomPool(240, 10, 8);
  const DiversityLevel level(3);
  const auto pages = RerankPages(pool, m, SelectClusterSubset(m, level), level);
  EXPECT_EQ(pages[0].slots.size(), 10u);
  EXPECT_TRUE(pages[0].degraded);
}

TEST(RerankTest, AdversarialPoolMatchesLadderReplay) {
  // Mostly out-of-subset candidates with a few in-subset ones concentrated
  // in one cluster, so all three steps of the ladder fire.
  const ClusterModel m = MakeModel(24 * 50, 9);
  const DiversityLevel level(1);
  const ClusterSubset subset = SelectClusterSubset(m, level);
  std::vector<ScoredCandidate> pool;
  double score = 5.0;
  for (MovieId id = 1; id <= 24 * 50; ++id) {
    const int c = m.ClusterOf(id);
    const bool in = subset.Contains(c);
    if (in && c != subset.clusters[0]) continue;
    if (in && id > 24 * 12) continue;
    pool.push_back({id, score});
    score -= 0.001;
  }
  const auto pages = RerankPages(pool, m, subset, level);
  const auto replay = ReplayPages(pool, m, subset.clusters, 1);
  for (int p = 0; p < 3; ++p) {
    EXPECT_EQ(Ids(pages[p]), replay[p]);
    EXPECT_TRUE(pages[p].degraded);
  }
  // FallbackFill on its own: subset first, then the rest by score.
  RecPage partial;
  partial.slots.push_back({1000000, 9.0, subset.clusters[0]});
  const std::vector<PageSlot> unused = {{1, 4.0, 99}, {2, 3.0, subset.clusters[1]}};
  const RecPage filled = FallbackFill(partial, unused, subset);
  ASSERT_EQ(filled.slots.size(), 3u);
  EXPECT_EQ(filled.slots[1].movie_id, 2);
  EXPECT_EQ(filled.slots[2].movie_id, 1);
  EXPECT_TRUE(filled.degraded);
}

TEST(RerankTest, Errors) {
  const ClusterModel m = MakeModel(240, 2);
  const DiversityLevel level(2);
  const auto subset = SelectClusterSubset(m, level);
  EXPECT_THROW(RerankPages({}, m, subset, level), std::invalid_argument);
  const std::vector<ScoredCandidate> stranger = {{99999, 4.0}};
  EXPECT_THROW(RerankPages(stranger, m, subset, level), std::invalid_argument);
}

}  // namespace
}  // namespace divrec
