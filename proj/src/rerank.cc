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

#include <algorithm>
#include <limits>

#include "divrec/diversity.h"

namespace divrec {

DiversityLevel::DiversityLevel(int level) : level_(level) {
  if (level < kMin || level > kMax) {
    throw std::out_of_range("diversity level must be in 1..5, got " +
                            std::to_string(level));
  }
}

int DiversityLevel::SubsetSize(int clusters) const {
  return std::min(clusters, 5 * level_);
}

int DiversityLevel::MaxPerCluster() const {
  const int width = 5 * level_;
  return (kPageSize + width - 1) / width;
}

bool ClusterSubset::Contains(int cluster) const {
  return std::find(clusters.begin(), clusters.end(), cluster) != clusters.end();
}

std::vector<int> GreedyClusterOrder(const ClusterModel& model) {
  const int k = model.k();
  std::vector<int> order;
  if (k == 0) return order;
  const auto& counts = model.rating_counts();
  int seed = 0;
  for (int c = 1; c < k; ++c) {
    if (counts[c] > counts[seed]) seed = c;
  }
  order.push_back(seed);

  // The subset's pairwise sum is fixed while choosing the next member, so
  // minimizing the subset diversity means minimizing the candidate's summed
  // distance to the current members.
  std::vector<std::vector<double>> distance(k, std::vector<double>(k, 0.0));
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      distance[a][b] = distance[b][a] = ClusterPairwiseDistance(model, a, b);
    }
  }
  std::vector<char> taken(k, 0);
  taken[seed] = 1;
  std::vector<double> added(k, 0.0);
  while (static_cast<int>(order.size()) < k) {
    const int last = order.back();
    int best = -1;
    double best_sum = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (taken[c]) continue;
      added[c] += distance[c][last];
      if (added[c] < best_sum) {
        best_sum = added[c];
        best = c;
      }
    }
    taken[best] = 1;
    order.push_back(best);
  }
  return order;
}

ClusterSubset SelectClusterSubset(const ClusterModel& model, DiversityLevel level) {
  auto order = GreedyClusterOrder(model);
  order.resize(std::min<std::size_t>(order.size(), level.SubsetSize(model.k())));
  return ClusterSubset{std::move(order)};
}

RecPage FallbackFill(RecPage partial, std::span<const PageSlot> unused,
                     const ClusterSubset& subset) {
  partial.degraded = true;
  std::vector<char> placed(unused.size(), 0);
  auto already_on_page = [&](MovieId movie) {
    return std::any_of(partial.slots.begin(), partial.slots.end(),
                       [&](const PageSlot& s) { return s.movie_id == movie; });
  };
  // Step 1: quota lifted, subset kept.
  for (std::size_t i = 0; i < unused.size() && partial.slots.size() < kPageSize; ++i) {
    if (!subset.Contains(unused[i].cluster_id) || already_on_page(unused[i].movie_id)) {
      continue;
    }
    partial.slots.push_back(unused[i]);
    placed[i] = 1;
  }
  // Step 2: any remaining candidate by score.
  for (std::size_t i = 0; i < unused.size() && partial.slots.size() < kPageSize; ++i) {
    if (placed[i] || already_on_page(unused[i].movie_id)) continue;
    partial.slots.push_back(unused[i]);
    placed[i] = 1;
  }
  return partial;
}

std::vector<RecPage> RerankPages(std::span<const ScoredCandidate> candidates,
                                 const ClusterModel& model, const ClusterSubset& subset,
                                 DiversityLevel level) {
  if (candidates.empty()) throw std::invalid_argument("candidate pool is empty");
  std::vector<PageSlot> pool;
  pool.reserve(candidates.size());
  for (const auto& c : candidates) {
    const int cluster = model.ClusterOf(c.movie_id);
    if (cluster < 0) {
      throw std::invalid_argument("candidate movie " + std::to_string(c.movie_id) +
                                  " has no cluster");
    }
    pool.push_back({c.movie_id, c.score, cluster});
  }
  std::vector<char> in_subset(model.k(), 0);
  for (int c : subset.clusters) in_subset.at(c) = 1;

  const int quota = level.MaxPerCluster();
  std::vector<char> used(pool.size(), 0);
  std::vector<RecPage> pages;
  for (int page_index = 1; page_index <= kRerankedPages; ++page_index) {
    RecPage page;
    page.page_index = page_index;
    std::vector<int> per_cluster(model.k(), 0);
    for (std::size_t i = 0; i < pool.size() && page.slots.size() < kPageSize; ++i) {
      if (used[i]) continue;
      const int cluster = pool[i].cluster_id;
      if (!in_subset[cluster] || per_cluster[cluster] >= quota) continue;
      page.slots.push_back(pool[i]);
      ++per_cluster[cluster];
      used[i] = 1;
    }
    if (page.slots.size() < kPageSize) {
      std::vector<PageSlot> unused;
      std::vector<std::size_t> unused_index;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!used[i]) {
          unused.push_back(pool[i]);
          unused_index.push_back(i);
        }
      }
      const std::size_t before = page.slots.size();
      page = FallbackFill(std::move(page), unused, subset);
      // Mark the candidates the fallback consumed.
      for (std::size_t s = before; s < page.slots.size(); ++s) {
        for (std::size_t u = 0; u < unused.size(); ++u) {
          if (unused[u].movie_id == page.slots[s].movie_id) {
            used[unused_index[u]] = 1;
            break;
          }
        }
      }
    }
    pages.push_back(std::move(page));
  }
  return pages;
}

}  // namespace divrec
