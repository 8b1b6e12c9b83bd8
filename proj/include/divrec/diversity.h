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

#ifndef DIVREC_DIVERSITY_H_
#define DIVREC_DIVERSITY_H_

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "divrec/corpus.h"
#include "divrec/types.h"

namespace divrec {

// Correlation distance 1 - r over two equal-length vectors, in [0, 2].
// A zero-variance input has no defined correlation; the pair is scored 1.0
// and *zero_variance (when given) is set.
// Throws std::invalid_argument on a length mismatch or length < 2.
double PearsonDistance(std::span<const double> a, std::span<const double> b,
                       bool* zero_variance = nullptr);

struct DiversityScore {
  double value = 0.0;
  // Ordered pairs that involved a zero-variance vector.
  std::size_t zero_variance_pairs = 0;
};

// Mean correlation distance over all ordered pairs of distinct positions.
// The value does not depend on the order of `items`.
// Throws std::invalid_argument when fewer than two items are given.
DiversityScore ListDiversity(std::span<const std::span<const double>> items);

// ListDiversity over the genome vectors of `movies`; movies without a vector
// are skipped. Returns nullopt when fewer than two remain.
std::optional<DiversityScore> MovieListDiversity(std::span<const MovieId> movies,
                                                 const GenomeTable& genome);

// Diversity of everything `user` rated at or after `since` (when given).
// nullopt means the user has fewer than two rated movies with genome vectors
// and is excluded from the cohort split.
std::optional<DiversityScore> UserHistoryDiversity(
    UserId user, std::span<const RatingEvent> ratings, const GenomeTable& genome,
    std::optional<Timestamp> since = std::nullopt);

struct UserScore {
  UserId user_id = 0;
  double score = 0.0;
};

struct CohortSplit {
  std::vector<UserScore> diverse;
  std::vector<UserScore> non_diverse;
  double threshold = 0.0;  // median score
};

// Ranks users by (score, user_id) ascending; the lower half (and the middle
// user of an odd count) is NonDiverse, the rest Diverse.
// Throws std::invalid_argument with fewer than two users.
CohortSplit SplitCohorts(std::vector<UserScore> users);

}  // namespace divrec

#endif  // DIVREC_DIVERSITY_H_
