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

#ifndef DIVREC_CLUSTERING_H_
#define DIVREC_CLUSTERING_H_

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "divrec/corpus.h"
#include "divrec/types.h"

namespace divrec {

inline constexpr int kDefaultClusters = 24;

struct KMeansConfig {
  int k = kDefaultClusters;
  int max_iterations = 300;
  std::uint64_t seed = 0;
  // k-means++ runs from seeds derived from `seed`; the best objective wins.
  int restarts = 4;
};

class ClusterModel {
 public:
  ClusterModel() = default;
  ClusterModel(DenseMatrix centroids, std::vector<MovieId> movies,
               std::vector<int> assignment);

  int k() const { return static_cast<int>(centroids_.rows()); }
  const DenseMatrix& centroids() const { return centroids_; }
  std::span<const double> Centroid(int cluster) const { return centroids_.row(cluster); }

  // Clustered movies and their cluster ids, index-aligned.
  const std::vector<MovieId>& movies() const { return movies_; }
  const std::vector<int>& assignment() const { return assignment_; }

  // -1 for movies that were not clustered.
  int ClusterOf(MovieId movie) const;
  std::vector<std::size_t> ClusterSizes() const;

  // Total ratings received by member movies, one entry per cluster.
  const std::vector<std::int64_t>& rating_counts() const { return rating_counts_; }
  void SetRatingCounts(std::vector<std::int64_t> counts);

  // Objective after each Lloyd iteration (sum of squared Euclidean
  // distances to the assigned centroid).
  const std::vector<double>& objective_history() const { return objective_history_; }
  void set_objective_history(std::vector<double> h) { objective_history_ = std::move(h); }
  int iterations() const { return static_cast<int>(objective_history_.size()); }

 private:
  DenseMatrix centroids_;
  std::vector<MovieId> movies_;
  std::vector<int> assignment_;
  std::unordered_map<MovieId, int> cluster_of_;
  std::vector<std::int64_t> rating_counts_;
  std::vector<double> objective_history_;
};

// Lloyd's algorithm on squared Euclidean distance with k-means++ seeding.
// Stops at an assignment fixpoint or after max_iterations. A cluster that
// empties out takes the point farthest from its own centroid.
// Throws std::invalid_argument when rows < k.
ClusterModel KMeans(const DenseMatrix& vectors, std::span<const MovieId> movies,
                    const KMeansConfig& config);

// Clusters every movie in the genome table.
ClusterModel ClusterGenome(const GenomeTable& genome, const KMeansConfig& config);

// Sum of squared distances from each row to the centroid of its cluster.
double KMeansObjective(const DenseMatrix& vectors, const DenseMatrix& centroids,
                       std::span<const int> assignment);

// Recounts ratings per cluster; ratings of unclustered movies are ignored.
std::vector<std::int64_t> CountClusterRatings(const ClusterModel& model,
                                              std::span<const RatingEvent> ratings);

// The `n` tags with the highest centroid relevance, ties by ascending tag id.
std::vector<TagLabel> TopTags(const ClusterModel& model, int cluster,
                              std::span<const TagLabel> tags, std::size_t n = 10);

// Correlation distance between two centroids.
double ClusterPairwiseDistance(const ClusterModel& model, int c1, int c2);

}  // namespace divrec

#endif  // DIVREC_CLUSTERING_H_
