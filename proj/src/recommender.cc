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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "divrec/random.h"

namespace divrec {

std::string_view AlgorithmName(Algorithm algo) {
  switch (algo) {
    case Algorithm::kPeasant:
      return "peasant";
    case Algorithm::kWarrior:
      return "warrior";
    case Algorithm::kWizard:
      return "wizard";
  }
  return "unknown";
}

Algorithm ParseAlgorithm(std::string_view name) {
  if (name == "peasant") return Algorithm::kPeasant;
  if (name == "warrior") return Algorithm::kWarrior;
  if (name == "wizard") return Algorithm::kWizard;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected peasant|warrior|wizard)");
}

double ClampRating(double score) { return std::clamp(score, kMinRating, kMaxRating); }

// ---------------------------------------------------------------------------
// Popularity

Prediction PopularityModel::Predict(UserId, MovieId movie) const {
  auto it = movies_.find(movie);
  if (it == movies_.end() || it->second.count == 0) return {global_mean_, false};
  return {it->second.mean, false};
}

PopularityModel TrainPopularity(std::span<const RatingEvent> ratings) {
  if (ratings.empty()) throw std::invalid_argument("cannot train on an empty corpus");
  std::unordered_map<MovieId, std::pair<double, std::int64_t>> sums;
  double total = 0.0;
  for (const auto& r : ratings) {
    auto& [sum, count] = sums[r.movie_id];
    sum += r.rating;
    ++count;
    total += r.rating;
  }
  std::unordered_map<MovieId, PopularityModel::MovieStats> movies;
  movies.reserve(sums.size());
  for (const auto& [movie, sc] : sums) {
    movies[movie] = {sc.first / static_cast<double>(sc.second), sc.second};
  }
  return PopularityModel(total / static_cast<double>(ratings.size()),
                         std::move(movies));
}

// ---------------------------------------------------------------------------
// Item-item

double ItemItemModel::Similarity(MovieId a, MovieId b) const {
  for (const auto& n : NeighborsOf(a)) {
    if (n.movie_id == b) return n.similarity;
  }
  return 0.0;
}

const std::vector<Neighbor>& ItemItemModel::NeighborsOf(MovieId movie) const {
  static const std::vector<Neighbor> kEmpty;
  auto it = state_.neighbors.find(movie);
  return it == state_.neighbors.end() ? kEmpty : it->second;
}

Prediction ItemItemModel::Predict(UserId user, MovieId movie) const {
  auto mean_it = state_.user_means.find(user);
  if (mean_it == state_.user_means.end()) {
    return {state_.popularity.Predict(user, movie).score, true};
  }
  const double mean = mean_it->second;
  const auto& rated = state_.user_ratings.at(user);
  double numerator = 0.0;
  double denominator = 0.0;
  for (const auto& n : NeighborsOf(movie)) {
    auto r = rated.find(n.movie_id);
    if (r == rated.end()) continue;
    numerator += n.similarity * (r->second - mean);
    denominator += std::abs(n.similarity);
  }
  if (denominator <= 0.0) return {ClampRating(mean), false};
  return {ClampRating(mean + numerator / denominator), false};
}

ItemItemModel TrainItemItem(std::span<const RatingEvent> ratings,
                            int neighborhood_size) {
  if (neighborhood_size < 1) throw std::invalid_argument("neighborhood_size must be >= 1");
  ItemItemModel::State state;
  state.neighborhood_size = neighborhood_size;
  if (ratings.empty()) return ItemItemModel(std::move(state));
  state.popularity = TrainPopularity(ratings);

  std::map<UserId, std::vector<std::pair<MovieId, double>>> by_user;
  for (const auto& r : ratings) by_user[r.user_id].emplace_back(r.movie_id, r.rating);

  std::vector<MovieId> movie_ids;
  for (const auto& r : ratings) movie_ids.push_back(r.movie_id);
  std::sort(movie_ids.begin(), movie_ids.end());
  movie_ids.erase(std::unique(movie_ids.begin(), movie_ids.end()), movie_ids.end());
  std::unordered_map<MovieId, std::size_t> movie_index;
  for (std::size_t i = 0; i < movie_ids.size(); ++i) movie_index[movie_ids[i]] = i;

  // Centered ratings per user, and raters per movie in ascending user order so
  // that both directions of a pair accumulate their sums in the same order.
  std::vector<std::vector<std::pair<std::size_t, double>>> user_rows;
  std::vector<std::vector<std::pair<std::size_t, double>>> movie_raters(movie_ids.size());
  for (const auto& [user, list] : by_user) {
    double sum = 0.0;
    for (const auto& [movie, value] : list) sum += value;
    const double mean = sum / static_cast<double>(list.size());
    state.user_means[user] = mean;
    auto& stored = state.user_ratings[user];
    std::vector<std::pair<std::size_t, double>> row;
    for (const auto& [movie, value] : list) {
      stored[movie] = value;
      row.emplace_back(movie_index[movie], value - mean);
    }
    const std::size_t user_row = user_rows.size();
    for (const auto& [m, centered] : row) movie_raters[m].emplace_back(user_row, centered);
    user_rows.push_back(std::move(row));
  }

  std::vector<double> dot(movie_ids.size(), 0.0);
  std::vector<double> norm_self(movie_ids.size(), 0.0);
  std::vector<double> norm_other(movie_ids.size(), 0.0);
  std::vector<char> touched_flag(movie_ids.size(), 0);
  std::vector<std::size_t> touched;
  for (std::size_t i = 0; i < movie_ids.size(); ++i) {
    touched.clear();
    for (const auto& [u, ci] : movie_raters[i]) {
      for (const auto& [j, cj] : user_rows[u]) {
        if (j == i) continue;
        if (!touched_flag[j]) {
          touched_flag[j] = 1;
          touched.push_back(j);
        }
        dot[j] += ci * cj;
        norm_self[j] += ci * ci;
        norm_other[j] += cj * cj;
      }
    }
    std::vector<Neighbor> list;
    for (std::size_t j : touched) {
      const double denom = std::sqrt(norm_self[j] * norm_other[j]);
      if (denom > 0.0 && dot[j] != 0.0) {
        list.push_back({movie_ids[j], std::clamp(dot[j] / denom, -1.0, 1.0)});
      }
      dot[j] = norm_self[j] = norm_other[j] = 0.0;
      touched_flag[j] = 0;
    }
    std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) {
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      return a.movie_id < b.movie_id;
    });
    if (list.size() > static_cast<std::size_t>(neighborhood_size)) {
      list.resize(neighborhood_size);
    }
    if (!list.empty()) state.neighbors[movie_ids[i]] = std::move(list);
  }
  return ItemItemModel(std::move(state));
}

// ---------------------------------------------------------------------------
// FunkSVD

FunkSvdModel::FunkSvdModel(State state) : state_(std::move(state)) {
  if (state_.user_bias.size() != state_.users.size() ||
      state_.item_bias.size() != state_.movies.size() ||
      state_.user_factors.rows() != state_.users.size() ||
      state_.item_factors.rows() != state_.movies.size() ||
      state_.user_factors.cols() != state_.item_factors.cols()) {
    throw std::invalid_argument("inconsistent factor model state");
  }
  for (std::size_t i = 0; i < state_.users.size(); ++i) user_index_[state_.users[i]] = i;
  for (std::size_t i = 0; i < state_.movies.size(); ++i) movie_index_[state_.movies[i]] = i;
}

double FunkSvdModel::RawScore(UserId user, MovieId movie) const {
  double score = state_.global_mean;
  auto u = user_index_.find(user);
  auto m = movie_index_.find(movie);
  if (u != user_index_.end()) score += state_.user_bias[u->second];
  if (m != movie_index_.end()) score += state_.item_bias[m->second];
  if (u != user_index_.end() && m != movie_index_.end()) {
    const auto pu = state_.user_factors.row(u->second);
    const auto qi = state_.item_factors.row(m->second);
    for (std::size_t f = 0; f < pu.size(); ++f) score += pu[f] * qi[f];
  }
  return score;
}

Prediction FunkSvdModel::Predict(UserId user, MovieId movie) const {
  if (!user_index_.count(user)) {
    return {state_.popularity.Predict(user, movie).score, true};
  }
  return {ClampRating(RawScore(user, movie)), false};
}

namespace {

void CheckFinite(double value, const char* what, int feature) {
  if (!std::isfinite(value)) {
    throw TrainingError(std::string("FunkSVD diverged: non-finite ") + what +
                        " at feature " + std::to_string(feature) +
                        "; lower the learning rate");
  }
}

}  // namespace

FunkSvdModel TrainFunkSvd(std::span<const RatingEvent> ratings,
                          const FunkSvdConfig& config, FunkSvdTrace* trace) {
  if (ratings.empty()) throw std::invalid_argument("cannot train on an empty corpus");
  if (config.features < 1 || config.epochs_per_feature < 1) {
    throw std::invalid_argument("features and epochs_per_feature must be >= 1");
  }

  FunkSvdModel::State state;
  state.popularity = TrainPopularity(ratings);
  state.global_mean = state.popularity.global_mean();
  for (const auto& r : ratings) {
    state.users.push_back(r.user_id);
    state.movies.push_back(r.movie_id);
  }
  auto dedupe = [](auto& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedupe(state.users);
  dedupe(state.movies);
  std::unordered_map<UserId, std::size_t> user_index;
  std::unordered_map<MovieId, std::size_t> movie_index;
  for (std::size_t i = 0; i < state.users.size(); ++i) user_index[state.users[i]] = i;
  for (std::size_t i = 0; i < state.movies.size(); ++i) movie_index[state.movies[i]] = i;

  struct Entry {
    std::uint32_t user;
    std::uint32_t movie;
    double rating;
    double residual;
  };
  std::vector<Entry> entries;
  entries.reserve(ratings.size());
  for (const auto& r : ratings) {
    entries.push_back({static_cast<std::uint32_t>(user_index[r.user_id]),
                       static_cast<std::uint32_t>(movie_index[r.movie_id]), r.rating,
                       0.0});
  }
  Rng rng(config.seed);
  rng.Shuffle(std::span<Entry>(entries));

  const double lr = config.learning_rate;
  const double reg = config.regularization;
  const int epochs = config.epochs_per_feature;
  state.user_bias.assign(state.users.size(), 0.0);
  state.item_bias.assign(state.movies.size(), 0.0);
  if (trace) trace->assign(static_cast<std::size_t>(config.features) + 1, {});

  // Stage 0: user and item biases around the global mean.
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (auto& e : entries) {
      double& bu = state.user_bias[e.user];
      double& bi = state.item_bias[e.movie];
      const double err = e.rating - state.global_mean - bu - bi;
      bu += lr * (err - reg * bu);
      bi += lr * (err - reg * bi);
    }
    if (trace) {
      double loss = 0.0;
      for (const auto& e : entries) {
        const double err = e.rating - state.global_mean - state.user_bias[e.user] -
                           state.item_bias[e.movie];
        loss += err * err;
      }
      for (double b : state.user_bias) loss += reg * b * b;
      for (double b : state.item_bias) loss += reg * b * b;
      (*trace)[0].push_back(loss);
    }
  }
  for (double b : state.user_bias) CheckFinite(b, "user bias", 0);
  for (double b : state.item_bias) CheckFinite(b, "item bias", 0);
  for (auto& e : entries) {
    e.residual = e.rating - state.global_mean - state.user_bias[e.user] -
                 state.item_bias[e.movie];
  }

  state.user_factors = DenseMatrix(state.users.size(), config.features, config.initial_value);
  state.item_factors = DenseMatrix(state.movies.size(), config.features, config.initial_value);
  std::vector<double> pu(state.users.size());
  std::vector<double> qi(state.movies.size());

  // Each feature is fit to the residual left by the biases and all earlier
  // features, then frozen.
  for (int f = 0; f < config.features; ++f) {
    std::fill(pu.begin(), pu.end(), config.initial_value);
    std::fill(qi.begin(), qi.end(), config.initial_value);
    for (int epoch = 0; epoch < epochs; ++epoch) {
      for (const auto& e : entries) {
        double& p = pu[e.user];
        double& q = qi[e.movie];
        const double err = e.residual - p * q;
        const double p_old = p;
        p += lr * (err * q - reg * p);
        q += lr * (err * p_old - reg * q);
      }
      if (trace) {
        double loss = 0.0;
        for (const auto& e : entries) {
          const double err = e.residual - pu[e.user] * qi[e.movie];
          loss += err * err;
        }
        for (double p : pu) loss += reg * p * p;
        for (double q : qi) loss += reg * q * q;
        (*trace)[f + 1].push_back(loss);
      }
    }
    for (std::size_t u = 0; u < pu.size(); ++u) {
      CheckFinite(pu[u], "user factor", f + 1);
      state.user_factors.at(u, f) = pu[u];
    }
    for (std::size_t m = 0; m < qi.size(); ++m) {
      CheckFinite(qi[m], "item factor", f + 1);
      state.item_factors.at(m, f) = qi[m];
    }
    for (auto& e : entries) e.residual -= pu[e.user] * qi[e.movie];
  }
  return FunkSvdModel(std::move(state));
}

// ---------------------------------------------------------------------------

TopNResult TopN(const Recommender& model, UserId user, std::size_t n,
                std::span<const MovieId> universe,
                const std::unordered_set<MovieId>& exclude) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  TopNResult result;
  std::vector<ScoredCandidate> scored;
  scored.reserve(universe.size());
  for (MovieId movie : universe) {
    if (exclude.count(movie)) continue;
    const Prediction p = model.Predict(user, movie);
    result.fallback = result.fallback || p.fallback;
    scored.push_back({movie, p.score});
  }
  auto better = [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.movie_id < b.movie_id;
  };
  const std::size_t keep = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(), better);
  scored.resize(keep);
  result.short_list = keep < n;
  result.items = std::move(scored);
  return result;
}

std::unordered_set<MovieId> RatedMovies(std::span<const RatingEvent> ratings,
                                        UserId user) {
  std::unordered_set<MovieId> rated;
  for (const auto& r : ratings) {
    if (r.user_id == user) rated.insert(r.movie_id);
  }
  return rated;
}

}  // namespace divrec
