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

#ifndef DIVREC_RERANK_H_
#define DIVREC_RERANK_H_

#include <span>
#include <stdexcept>
#include <vector>

#include "divrec/clustering.h"
#include "divrec/recommender.h"

namespace divrec {

inline constexpr int kPageSize = 24;
inline constexpr int kRerankedPages = 3;
inline constexpr int kDefaultPoolSize = 600;

// User-selected diversity level, 1 (narrowest) to 5 (broadest).
class DiversityLevel {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 5;
  static constexpr int kSessionDefault = 3;

  // Throws std::out_of_range outside [1, 5].
  explicit DiversityLevel(int level);

  int value() const { return level_; }
  // min(clusters, 5L); 5, 10, 15, 20, 24 for the default 24 clusters.
  int SubsetSize(int clusters = kDefaultClusters) const;
  // ceil(24 / 5L); 5, 3, 2, 2, 1.
  int MaxPerCluster() const;

  bool operator==(const DiversityLevel&) const = default;

 private:
  int level_;
};

// Clusters to draw from, seed (most-rated) cluster first.
struct ClusterSubset {
  std::vector<int> clusters;
  bool Contains(int cluster) const;
};

// Full greedy order over all clusters: start from the cluster with the most
// ratings, then repeatedly append the cluster that keeps the centroid-list
// diversity lowest. Ties go to the lower cluster id.
std::vector<int> GreedyClusterOrder(const ClusterModel& model);

// The first SubsetSize(L) entries of GreedyClusterOrder.
ClusterSubset SelectClusterSubset(const ClusterModel& model, DiversityLevel level);

struct PageSlot {
  MovieId movie_id = 0;
  double score = 0.0;
  int cluster_id = -1;
  bool operator==(const PageSlot&) const = default;
};

struct RecPage {
  int page_index = 1;  // 1-based
  std::vector<PageSlot> slots;
  // Quotas or the subset had to be relaxed, or the pool ran out.
  bool degraded = false;
  bool operator==(const RecPage&) const = default;
};

// Completes a page that a full quota-respecting scan left short. `unused`
// must be in score order. Relaxes in two steps: first admit in-subset
// candidates regardless of quota, then any candidate by score. Marks the
// page degraded.
RecPage FallbackFill(RecPage partial, std::span<const PageSlot> unused,
                     const ClusterSubset& subset);

// Builds the three re-ranked pages from a score-sorted candidate pool.
// Candidates are consumed across pages so no movie appears twice.
// Throws std::invalid_argument for an empty pool or a candidate without a
// cluster.
std::vector<RecPage> RerankPages(std::span<const ScoredCandidate> candidates,
                                 const ClusterModel& model, const ClusterSubset& subset,
                                 DiversityLevel level);

}  // namespace divrec

#endif  // DIVREC_RERANK_H_
