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

#include "divrec/diversity.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace divrec {
namespace {

// Mean-centered copy plus its sum of squares. Both distance entry points go
// through this so a pair scores bit-identically either way.
struct Centered {
  std::vector<double> values;
  double sum_squares = 0.0;
  bool constant = false;
};

Centered Center(std::span<const double> v) {
  Centered c;
  c.constant = std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  c.values.resize(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    c.values[k] = v[k] - mean;
    c.sum_squares += c.values[k] * c.values[k];
  }
  return c;
}

double CenteredDistance(const Centered& a, const Centered& b, bool* zero_variance) {
  if (a.constant || b.constant || a.sum_squares <= 0.0 || b.sum_squares <= 0.0) {
    if (zero_variance) *zero_variance = true;
    return 1.0;
  }
  if (zero_variance) *zero_variance = false;
  double cross = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) cross += a.values[k] * b.values[k];
  const double r = std::clamp(cross / std::sqrt(a.sum_squares * b.sum_squares), -1.0, 1.0);
  return 1.0 - r;
}

}  // namespace

double PearsonDistance(std::span<const double> a, std::span<const double> b,
                       bool* zero_variance) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("pearson distance: length mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw std::invalid_argument("pearson distance: need length >= 2");
  return CenteredDistance(Center(a), Center(b), zero_variance);
}

DiversityScore ListDiversity(std::span<const std::span<const double>> items) {
  if (items.size() < 2) {
    throw std::invalid_argument("diversity undefined below two items");
  }
  const std::size_t dim = items[0].size();
  for (const auto& item : items) {
    if (item.size() != dim) throw std::invalid_argument("diversity: length mismatch");
  }
  if (dim < 2) throw std::invalid_argument("diversity: vectors need length >= 2");

  // Sum in a canonical (lexicographic) item order so the floating-point
  // result is independent of the caller's ordering.
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::lexicographical_compare(items[x].begin(), items[x].end(),
                                        items[y].begin(), items[y].end());
  });
  std::vector<Centered> centered;
  centered.reserve(items.size());
  for (std::size_t index : order) centered.push_back(Center(items[index]));

  DiversityScore score;
  double sum = 0.0;
  for (std::size_t i = 0; i < centered.size(); ++i) {
    for (std::size_t j = i + 1; j < centered.size(); ++j) {
      bool degenerate = false;
      sum += CenteredDistance(centered[i], centered[j], &degenerate);
      if (degenerate) score.zero_variance_pairs += 2;
    }
  }
  const double n = static_cast<double>(items.size());
  score.value = 2.0 * sum / (n * (n - 1.0));
  return score;
}

std::optional<DiversityScore> MovieListDiversity(std::span<const MovieId> movies,
                                                 const GenomeTable& genome) {
  std::vector<std::span<const double>> vectors;
  for (MovieId movie : movies) {
    if (genome.Contains(movie)) vectors.push_back(genome.Vector(movie));
  }
  if (vectors.size() < 2) return std::nullopt;
  return ListDiversity(vectors);
}

std::optional<DiversityScore> UserHistoryDiversity(UserId user,
                                                   std::span<const RatingEvent> ratings,
                                                   const GenomeTable& genome,
                                                   std::optional<Timestamp> since) {
  std::vector<MovieId> movies;
  for (const auto& r : ratings) {
    if (r.user_id != user) continue;
    if (since && r.timestamp < *since) continue;
    movies.push_back(r.movie_id);
  }
  std::sort(movies.begin(), movies.end());
  movies.erase(std::unique(movies.begin(), movies.end()), movies.end());
  return MovieListDiversity(movies, genome);
}

CohortSplit SplitCohorts(std::vector<UserScore> users) {
  if (users.size() < 2) {
    throw std::invalid_argument("cohort split needs at least two eligible users");
  }
  std::sort(users.begin(), users.end(), [](const UserScore& a, const UserScore& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.user_id < b.user_id;
  });
  const std::size_t n = users.size();
  const std::size_t non_diverse_count = (n + 1) / 2;
  CohortSplit split;
  split.threshold = n % 2 == 1 ? users[n / 2].score
                               : 0.5 * (users[n / 2 - 1].score + users[n / 2].score);
  split.non_diverse.assign(users.begin(), users.begin() + non_diverse_count);
  split.diverse.assign(users.begin() + non_diverse_count, users.end());
  return split;
}

}  // namespace divrec
