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

#include "divrec/clustering.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "divrec/diversity.h"
#include "divrec/simulator.h"
#include "test_support.h"

namespace divrec {
namespace {

using testing::MakeMixture;
using testing::OracleObjective;

// Same partition up to relabelling.
bool SamePartition(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [x, fresh] = ab.emplace(a[i], b[i]);
    if (!fresh && x->second != b[i]) return false;
    auto [y, fresh2] = ba.emplace(b[i], a[i]);
    if (!fresh2 && y->second != a[i]) return false;
  }
  return true;
}

TEST(KMeansTest, RecoversTwoSeparatedClouds) {
  const auto mix = MakeMixture(2, 40, 5, 10.0, 0.3, 8);
  const ClusterModel m = KMeans(mix.points, mix.ids, {.k = 2, .seed = 1});
  EXPECT_TRUE(SamePartition(m.assignment(), mix.labels));
}

TEST(KMeansTest, SameSeedSameAssignment) {
  const auto mix = MakeMixture(5, 30, 6, 2.0, 1.0, 3);
  const ClusterModel a = KMeans(mix.points, mix.ids, {.k = 5, .seed = 9});
  const ClusterModel b = KMeans(mix.points, mix.ids, {.k = 5, .seed = 9});
  EXPECT_EQ(a.assignment(), b.assignment());
  EXPECT_EQ(a.centroids(), b.centroids());
}

TEST(KMeansTest, PlantedThirtyPointMixtureWithinOnePercent) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto mix = MakeMixture(3, 10, 4, 4.0, 1.0, 100 + seed);
    const ClusterModel m = KMeans(mix.points, mix.ids, {.k = 3, .seed = seed});
    const double planted = OracleObjective(mix.points, mix.labels, 3);
    EXPECT_LE(OracleObjective(mix.points, m.assignment(), 3), planted * 1.01) << seed;
  }
}

TEST(KMeansTest, ObjectiveNonIncreasingAndClustersNonEmpty) {
  const PlantedGenome g = MakePlantedGenome(800, 24, 64, 0.15, 5);
  const ClusterModel m = ClusterGenome(g.genome, {.k = 24, .seed = 5});
  const auto& h = m.objective_history();
  ASSERT_FALSE(h.empty());
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1]);
  const auto sizes = m.ClusterSizes();
  ASSERT_EQ(sizes.size(), 24u);
  for (std::size_t s : sizes) EXPECT_GT(s, 0u);
  EXPECT_NEAR(KMeansObjective(g.genome.matrix(), m.centroids(), m.assignment()), h.back(),
              1e-9 * h.back());
}

TEST(KMeansTest, DuplicatePointsStillFillEveryCluster) {
  DenseMatrix x;
  std::vector<MovieId> ids;
  for (int i = 0; i < 12; ++i) {
    x.AppendRow(std::vector<double>{i < 10 ? 0.0 : 1.0, 0.0});
    ids.push_back(i + 1);
  }
  const ClusterModel m = KMeans(x, ids, {.k = 4, .seed = 2});
  for (std::size_t s : m.ClusterSizes()) EXPECT_GT(s, 0u);
}

TEST(KMeansTest, Errors) {
  const auto mix = MakeMixture(1, 3, 2, 1.0, 1.0, 1);
  EXPECT_THROW(KMeans(mix.points, mix.ids, {.k = 4}), std::invalid_argument);
  EXPECT_THROW(KMeans(mix.points, mix.ids, {.k = 0}), std::invalid_argument);
  const std::vector<MovieId> short_ids = {1, 2};
  EXPECT_THROW(KMeans(mix.points, short_ids, {.k = 1}), std::invalid_argument);
}

TEST(ClusterModelTest, RatingRecount) {
  const auto mix = MakeMixture(2, 3, 2, 10.0, 0.1, 4);
  const ClusterModel m = KMeans(mix.points, mix.ids, {.k = 2, .seed = 0});
  const std::vector<RatingEvent> r = {{1, 1, 4, 0}, {2, 1, 3, 0}, {1, 4, 2, 0}, {1, 77, 5, 0}};
  const auto counts = CountClusterRatings(m, r);
  ASSERT_EQ(counts.size(), 2u);
  EXPECT_EQ(counts[m.ClusterOf(1)], 2);
  EXPECT_EQ(counts[m.ClusterOf(4)], 1);
  EXPECT_EQ(m.ClusterOf(77), -1);
}

ClusterModel FromCentroids(const std::vector<std::vector<double>>& c) {
  DenseMatrix centroids;
  std::vector<MovieId> movies;
  std::vector<int> assignment;
  for (std::size_t i = 0; i < c.size(); ++i) {
    centroids.AppendRow(c[i]);
    movies.push_back(static_cast<MovieId>(i + 1));
    assignment.push_back(static_cast<int>(i));
  }
  return ClusterModel(centroids, movies, assignment);
}

std::vector<TagLabel> Labels(std::size_t dim) {
  std::vector<TagLabel> tags;
  for (std::size_t t = 0; t < dim; ++t) tags.push_back({static_cast<int>(t), "t" + std::to_string(t)});
  return tags;
}

TEST(TopTagsTest, DominantCoordinateFirst) {
  std::vector<double> c(20, 0.1);
  c[13] = 0.99;
  const ClusterModel m = FromCentroids({c});
  const auto tags = TopTags(m, 0, Labels(20), 3);
  ASSERT_EQ(tags.size(), 3u);
  EXPECT_EQ(tags[0].tag_id, 13);
  EXPECT_EQ(tags[1].tag_id, 0);  // ties by ascending id
  EXPECT_EQ(tags[2].tag_id, 1);
}

TEST(TopTagsTest, ClampsToAllTagsAndMatchesSortOracle) {
  Rng rng(6);
  std::vector<double> c(kGenomeDim);
  for (double& x : c) x = std::round(rng.Uniform() * 50) / 50;  // force ties
  const ClusterModel m = FromCentroids({c});
  const auto all = TopTags(m, 0, Labels(kGenomeDim), 5000);
  ASSERT_EQ(all.size(), kGenomeDim);
  std::vector<int> oracle(kGenomeDim);
  for (std::size_t i = 0; i < kGenomeDim; ++i) oracle[i] = static_cast<int>(i);
  std::stable_sort(oracle.begin(), oracle.end(), [&](int a, int b) { return c[a] > c[b]; });
  for (std::size_t i = 0; i < kGenomeDim; ++i) EXPECT_EQ(all[i].tag_id, oracle[i]);
  EXPECT_THROW(TopTags(m, 1, Labels(kGenomeDim)), std::out_of_range);
}

TEST(ClusterDistanceTest, SelfSymmetryAndOracle) {
  Rng rng(24);
  std::vector<std::vector<double>> c(24, std::vector<double>(30));
  for (auto& row : c) {
    for (double& x : row) x = rng.Uniform();
  }
  const ClusterModel m = FromCentroids(c);
  for (int a = 0; a < 24; ++a) {
    EXPECT_EQ(ClusterPairwiseDistance(m, a, a), 0.0);
    for (int b = 0; b < 24; ++b) {
      EXPECT_EQ(ClusterPairwiseDistance(m, a, b), ClusterPairwiseDistance(m, b, a));
      if (a != b) {
        EXPECT_NEAR(ClusterPairwiseDistance(m, a, b), testing::OracleListDiversity({c[a], c[b]}),
                    1e-12);
      }
    }
  }
}

}  // namespace
}  // namespace divrec
