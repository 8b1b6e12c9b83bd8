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

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "divrec/diversity.h"
#include "divrec/random.h"

namespace divrec {
namespace {

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

DenseMatrix KMeansPlusPlus(const DenseMatrix& x, int k, Rng& rng) {
  const std::size_t n = x.rows();
  DenseMatrix centers(0, x.cols());
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<char> chosen(n, 0);
  std::size_t pick = rng.Below(n);
  for (int c = 0; c < k; ++c) {
    chosen[pick] = 1;
    centers.AppendRow(x.row(pick));
    if (c + 1 == k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(x.row(i), x.row(pick)));
      total += nearest[i];
    }
    if (total <= 0.0) {
      // Remaining points coincide with chosen centers.
      pick = std::find(chosen.begin(), chosen.end(), 0) - chosen.begin();
      continue;
    }
    double target = rng.Uniform() * total;
    pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest[i] <= 0.0) continue;
      target -= nearest[i];
      if (target < 0.0) {
        pick = i;
        break;
      }
    }
    if (pick == n) {
      // Rounding left target >= 0; take the last point with positive weight.
      for (std::size_t i = n; i-- > 0;) {
        if (nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
    }
  }
  return centers;
}

// Returns true when any assignment changed.
bool AssignPoints(const DenseMatrix& x, const DenseMatrix& centers,
                  std::vector<int>& assignment) {
  bool changed = false;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    int best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.rows(); ++c) {
      const double d = SquaredDistance(x.row(i), centers.row(c));
      if (d < best_distance) {
        best_distance = d;
        best = static_cast<int>(c);
      }
    }
    if (assignment[i] != best) {
      assignment[i] = best;
      changed = true;
    }
  }
  return changed;
}

void UpdateCentroids(const DenseMatrix& x, std::span<const int> assignment,
                     DenseMatrix& centers, std::vector<std::size_t>& sizes) {
  const std::size_t k = centers.rows();
  centers = DenseMatrix(k, x.cols(), 0.0);
  sizes.assign(k, 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = centers.row(assignment[i]);
    const auto point = x.row(i);
    for (std::size_t d = 0; d < point.size(); ++d) row[d] += point[d];
    ++sizes[assignment[i]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] == 0) continue;
    const double inv = 1.0 / static_cast<double>(sizes[c]);
    for (double& v : centers.row(c)) v *= inv;
  }
}

// Moves the point farthest from its centroid (among clusters that can spare
// one) into each empty cluster, then recomputes the means.
void RepairEmptyClusters(const DenseMatrix& x, std::vector<int>& assignment,
                         DenseMatrix& centers, std::vector<std::size_t>& sizes) {
  bool repaired = false;
  for (std::size_t empty = 0; empty < sizes.size(); ++empty) {
    if (sizes[empty] != 0) continue;
    std::size_t farthest = x.rows();
    double farthest_distance = -1.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (sizes[assignment[i]] < 2) continue;
      const double d = SquaredDistance(x.row(i), centers.row(assignment[i]));
      if (d > farthest_distance) {
        farthest_distance = d;
        farthest = i;
      }
    }
    if (farthest == x.rows()) throw std::logic_error("k-means repair found no donor");
    --sizes[assignment[farthest]];
    assignment[farthest] = static_cast<int>(empty);
    sizes[empty] = 1;
    std::copy(x.row(farthest).begin(), x.row(farthest).end(), centers.row(empty).begin());
    repaired = true;
  }
  if (repaired) UpdateCentroids(x, assignment, centers, sizes);
}

}  // namespace

ClusterModel::ClusterModel(DenseMatrix centroids, std::vector<MovieId> movies,
                           std::vector<int> assignment)
    : centroids_(std::move(centroids)),
      movies_(std::move(movies)),
      assignment_(std::move(assignment)),
      rating_counts_(centroids_.rows(), 0) {
  if (movies_.size() != assignment_.size()) {
    throw std::invalid_argument("cluster assignment does not match movie list");
  }
  for (std::size_t i = 0; i < movies_.size(); ++i) {
    if (assignment_[i] < 0 || assignment_[i] >= k()) {
      throw std::invalid_argument("cluster id out of range");
    }
    if (!cluster_of_.emplace(movies_[i], assignment_[i]).second) {
      throw std::invalid_argument("movie clustered twice");
    }
  }
}

int ClusterModel::ClusterOf(MovieId movie) const {
  auto it = cluster_of_.find(movie);
  return it == cluster_of_.end() ? -1 : it->second;
}

std::vector<std::size_t> ClusterModel::ClusterSizes() const {
  std::vector<std::size_t> sizes(k(), 0);
  for (int c : assignment_) ++sizes[c];
  return sizes;
}

void ClusterModel::SetRatingCounts(std::vector<std::int64_t> counts) {
  if (counts.size() != static_cast<std::size_t>(k())) {
    throw std::invalid_argument("rating counts must have one entry per cluster");
  }
  rating_counts_ = std::move(counts);
}

double KMeansObjective(const DenseMatrix& vectors, const DenseMatrix& centroids,
                       std::span<const int> assignment) {
  double total = 0.0;
  for (std::size_t i = 0; i < vectors.rows(); ++i) {
    total += SquaredDistance(vectors.row(i), centroids.row(assignment[i]));
  }
  return total;
}

ClusterModel KMeans(const DenseMatrix& vectors, std::span<const MovieId> movies,
                    const KMeansConfig& config) {
  if (config.k < 1) throw std::invalid_argument("k must be >= 1");
  if (vectors.rows() < static_cast<std::size_t>(config.k)) {
    throw std::invalid_argument("k-means needs at least k vectors (have " +
                                std::to_string(vectors.rows()) + ", k=" +
                                std::to_string(config.k) + ")");
  }
  if (movies.size() != vectors.rows()) {
    throw std::invalid_argument("movie ids do not match vector rows");
  }
  if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");

  if (config.restarts < 1) throw std::invalid_argument("restarts must be >= 1");

  // Independent k-means++ runs; keep the lowest final objective (earliest on
  // ties). Run 0 draws from `seed` itself.
  DenseMatrix best_centers;
  std::vector<int> best_assignment;
  std::vector<double> best_history;
  for (int run = 0; run < config.restarts; ++run) {
    Rng rng(run == 0 ? config.seed : Mix64(config.seed ^ Mix64(static_cast<std::uint64_t>(run))));
    DenseMatrix centers = KMeansPlusPlus(vectors, config.k, rng);
    std::vector<int> assignment(vectors.rows(), -1);
    std::vector<std::size_t> sizes;
    std::vector<double> history;
    AssignPoints(vectors, centers, assignment);
    for (int iteration = 0; iteration < config.max_iterations; ++iteration) {
      UpdateCentroids(vectors, assignment, centers, sizes);
      RepairEmptyClusters(vectors, assignment, centers, sizes);
      history.push_back(KMeansObjective(vectors, centers, assignment));
      if (iteration + 1 == config.max_iterations) break;
      if (!AssignPoints(vectors, centers, assignment)) break;
    }
    if (best_history.empty() || history.back() < best_history.back()) {
      best_centers = std::move(centers);
      best_assignment = std::move(assignment);
      best_history = std::move(history);
    }
  }

  ClusterModel model(std::move(best_centers),
                     std::vector<MovieId>(movies.begin(), movies.end()),
                     std::move(best_assignment));
  model.set_objective_history(std::move(best_history));
  return model;
}

ClusterModel ClusterGenome(const GenomeTable& genome, const KMeansConfig& config) {
  return KMeans(genome.matrix(), genome.movie_ids(), config);
}

std::vector<std::int64_t> CountClusterRatings(const ClusterModel& model,
                                              std::span<const RatingEvent> ratings) {
  std::vector<std::int64_t> counts(model.k(), 0);
  for (const auto& r : ratings) {
    const int c = model.ClusterOf(r.movie_id);
    if (c >= 0) ++counts[c];
  }
  return counts;
}

std::vector<TagLabel> TopTags(const ClusterModel& model, int cluster,
                              std::span<const TagLabel> tags, std::size_t n) {
  if (cluster < 0 || cluster >= model.k()) throw std::out_of_range("cluster id out of range");
  const auto centroid = model.Centroid(cluster);
  if (tags.size() != centroid.size()) {
    throw std::invalid_argument("tag labels do not match centroid width");
  }
  std::vector<std::size_t> order(centroid.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t keep = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (centroid[a] != centroid[b]) return centroid[a] > centroid[b];
                      return a < b;
                    });
  std::vector<TagLabel> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(tags[order[i]]);
  return out;
}

double ClusterPairwiseDistance(const ClusterModel& model, int c1, int c2) {
  if (c1 < 0 || c1 >= model.k() || c2 < 0 || c2 >= model.k()) {
    throw std::out_of_range("cluster id out of range");
  }
  return PearsonDistance(model.Centroid(c1), model.Centroid(c2));
}

}  // namespace divrec
