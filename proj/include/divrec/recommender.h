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

#ifndef DIVREC_RECOMMENDER_H_
#define DIVREC_RECOMMENDER_H_

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "divrec/corpus.h"
#include "divrec/types.h"

namespace divrec {

enum class Algorithm { kPeasant, kWarrior, kWizard };

std::string_view AlgorithmName(Algorithm algo);
// Accepts peasant|warrior|wizard. Throws std::invalid_argument otherwise.
Algorithm ParseAlgorithm(std::string_view name);

struct Prediction {
  double score = 0.0;
  // Set when the user is unknown to a personalized model and the
  // non-personalized popularity path answered instead.
  bool fallback = false;
};

class Recommender {
 public:
  virtual ~Recommender() = default;
  virtual Algorithm algorithm() const = 0;
  virtual Prediction Predict(UserId user, MovieId movie) const = 0;
};

double ClampRating(double score);

// Per-movie rating means ("Peasant").
class PopularityModel : public Recommender {
 public:
  struct MovieStats {
    double mean = 0.0;
    std::int64_t count = 0;
    bool operator==(const MovieStats&) const = default;
  };

  PopularityModel() = default;
  PopularityModel(double global_mean,
                  std::unordered_map<MovieId, MovieStats> movies)
      : global_mean_(global_mean), movies_(std::move(movies)) {}

  Algorithm algorithm() const override { return Algorithm::kPeasant; }
  Prediction Predict(UserId user, MovieId movie) const override;

  double global_mean() const { return global_mean_; }
  const std::unordered_map<MovieId, MovieStats>& movies() const { return movies_; }

 private:
  double global_mean_ = 0.0;
  std::unordered_map<MovieId, MovieStats> movies_;
};

// Throws std::invalid_argument on an empty rating list.
PopularityModel TrainPopularity(std::span<const RatingEvent> ratings);

struct Neighbor {
  MovieId movie_id = 0;
  double similarity = 0.0;
  bool operator==(const Neighbor&) const = default;
};

// Item-item collaborative filtering ("Warrior"). Similarities are cosines
// over user-mean-centered ratings restricted to co-raters; predictions are
// the user mean plus the similarity-weighted average centered rating of the
// target's neighbors the user has rated.
class ItemItemModel : public Recommender {
 public:
  struct State {
    int neighborhood_size = 30;
    std::unordered_map<MovieId, std::vector<Neighbor>> neighbors;
    std::unordered_map<UserId, double> user_means;
    // The model keeps each user's ratings to score against neighbors.
    std::unordered_map<UserId, std::unordered_map<MovieId, double>> user_ratings;
    PopularityModel popularity;
  };

  explicit ItemItemModel(State state) : state_(std::move(state)) {}

  Algorithm algorithm() const override { return Algorithm::kWarrior; }
  Prediction Predict(UserId user, MovieId movie) const override;

  double Similarity(MovieId a, MovieId b) const;
  const std::vector<Neighbor>& NeighborsOf(MovieId movie) const;
  const State& state() const { return state_; }

 private:
  State state_;
};

ItemItemModel TrainItemItem(std::span<const RatingEvent> ratings,
                            int neighborhood_size = 30);

struct FunkSvdConfig {
  int features = 50;
  int epochs_per_feature = 125;
  double learning_rate = 0.005;
  double regularization = 0.02;
  double initial_value = 0.1;
  std::uint64_t seed = 0;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Biased matrix factorization trained one feature at a time ("Wizard").
class FunkSvdModel : public Recommender {
 public:
  struct State {
    double global_mean = 0.0;
    std::vector<UserId> users;
    std::vector<MovieId> movies;
    std::vector<double> user_bias;
    std::vector<double> item_bias;
    DenseMatrix user_factors;  // users x features
    DenseMatrix item_factors;  // movies x features
    PopularityModel popularity;
  };

  explicit FunkSvdModel(State state);

  Algorithm algorithm() const override { return Algorithm::kWizard; }
  Prediction Predict(UserId user, MovieId movie) const override;

  // Prediction before clamping to the rating scale; unknown ids contribute
  // zero bias and factors.
  double RawScore(UserId user, MovieId movie) const;
  int features() const { return static_cast<int>(state_.user_factors.cols()); }
  const State& state() const { return state_; }

 private:
  State state_;
  std::unordered_map<UserId, std::size_t> user_index_;
  std::unordered_map<MovieId, std::size_t> movie_index_;
};

// Training trace: entry [f][e] is the regularized squared-error objective of
// feature f after epoch e. Entry 0 of the outer list covers the bias stage.
using FunkSvdTrace = std::vector<std::vector<double>>;

FunkSvdModel TrainFunkSvd(std::span<const RatingEvent> ratings,
                          const FunkSvdConfig& config = {},
                          FunkSvdTrace* trace = nullptr);

struct ScoredCandidate {
  MovieId movie_id = 0;
  double score = 0.0;
  bool operator==(const ScoredCandidate&) const = default;
};

struct TopNResult {
  std::vector<ScoredCandidate> items;
  bool short_list = false;  // fewer than n eligible movies
  bool fallback = false;    // user unknown to the model
};

// Scores every movie in `universe` not in `exclude`, returning the best `n`
// sorted by score descending with ascending movie_id among ties.
TopNResult TopN(const Recommender& model, UserId user, std::size_t n,
                std::span<const MovieId> universe,
                const std::unordered_set<MovieId>& exclude);

std::unordered_set<MovieId> RatedMovies(std::span<const RatingEvent> ratings,
                                        UserId user);

}  // namespace divrec

#endif  // DIVREC_RECOMMENDER_H_
