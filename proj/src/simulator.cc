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

#include "divrec/simulator.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "divrec/diversity.h"
#include "divrec/random.h"

namespace divrec {
namespace {

double RoundHalfStar(double x) {
  return std::clamp(std::round(x * 2.0) / 2.0, kMinRating, kMaxRating);
}

Rng StreamFor(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return Rng(Mix64(seed ^ Mix64(a ^ Mix64(b))));
}

struct EffectiveRates {
  double login = 0.0;
  double page_view = 0.0;
  double wishlist = 0.0;
  double rating = 0.0;
  double slider = 0.0;
  double carousel = 0.0;
  double mean_rating = 0.0;
};

EffectiveRates RatesFor(const SimulationConfig& config, const Arm& arm,
                        const std::string& window) {
  const BehaviorRates& b = config.rates;
  EffectiveRates r{b.logins_per_month,    b.page_views_per_session,
                   b.wishlist_per_session, b.ratings_per_session,
                   b.sliders_per_session,  b.carousel_clicks_per_session,
                   b.mean_rating};
  for (const auto& s : config.shifts) {
    if (s.arm != arm || s.window != window) continue;
    if (s.rate == "login") r.login *= s.multiplier;
    else if (s.rate == "page_view") r.page_view *= s.multiplier;
    else if (s.rate == "wishlist") r.wishlist *= s.multiplier;
    else if (s.rate == "rating") r.rating *= s.multiplier;
    else if (s.rate == "slider") r.slider *= s.multiplier;
    else if (s.rate == "carousel") r.carousel *= s.multiplier;
    else if (s.rate == "mean_rating") r.mean_rating *= s.multiplier;
    else throw std::invalid_argument("unknown rate '" + s.rate + "' in shift");
  }
  return r;
}

// Bookkeeping mirror of one user's window, kept independently of the log.
struct WindowTally {
  std::int64_t sessions = 0;
  std::int64_t sliders = 0;
  std::int64_t unique_views = 0;
  std::int64_t unique_wishlist = 0;
  Timestamp length_seconds = 0;
  std::map<MovieId, double> latest_rating;
};

MetricsRecord TallyToRecord(const WindowTally& t, const Window& window,
                            const GenomeTable& genome) {
  MetricsRecord r;
  if (t.sessions == 0) return r;
  const double sessions = static_cast<double>(t.sessions);
  r.slider_interactions = t.sliders;
  r.page_view_freq = static_cast<double>(t.unique_views) / sessions;
  r.wishlist_freq = static_cast<double>(t.unique_wishlist) / sessions;
  r.login_frequency = static_cast<double>(t.sessions) / (window.Days() / 30.0);
  r.total_length = static_cast<double>(t.length_seconds) / 60.0;
  r.num_ratings = static_cast<std::int64_t>(t.latest_rating.size());
  if (!t.latest_rating.empty()) {
    double sum = 0.0;
    std::vector<MovieId> rated;
    for (const auto& [movie, value] : t.latest_rating) {
      sum += value;
      rated.push_back(movie);
    }
    r.avg_rating = sum / static_cast<double>(rated.size());
    if (auto d = MovieListDiversity(rated, genome)) r.rating_diversity = d->value;
  }
  return r;
}

enum class Action { kPageView, kWishlist, kRating, kSlider, kCarousel };

}  // namespace

PlantedGenome MakePlantedGenome(int movies, int clusters, std::size_t dim, double noise,
                                std::uint64_t seed) {
  if (clusters < 1 || movies < clusters) {
    throw std::invalid_argument("planted genome needs movies >= clusters >= 1");
  }
  Rng rng(seed);
  PlantedGenome out;
  out.prototypes = DenseMatrix(static_cast<std::size_t>(clusters), dim);
  for (int c = 0; c < clusters; ++c) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double u = rng.Uniform();
      out.prototypes.at(c, j) = u * u * u;  // mostly low relevance, a few high tags
    }
  }
  std::vector<TagLabel> tags;
  std::vector<int> external;
  for (std::size_t j = 0; j < dim; ++j) {
    tags.push_back({static_cast<int>(j), "tag" + std::to_string(j + 1)});
    external.push_back(static_cast<int>(j + 1));
  }
  out.genome = GenomeTable(std::move(tags), std::move(external));
  std::vector<double> v(dim);
  for (int m = 0; m < movies; ++m) {
    // Round-robin keeps planted sizes balanced.
    const int c = m % clusters;
    for (std::size_t j = 0; j < dim; ++j) {
      v[j] = std::clamp(out.prototypes.at(c, j) + rng.Normal(0.0, noise), 0.0, 1.0);
    }
    out.genome.Add(m + 1, v);
    out.cluster_of.push_back(c);
  }
  return out;
}

SyntheticCorpus MakeSyntheticCorpus(const SyntheticCorpusConfig& config) {
  if (config.ratings_per_user > config.movies) {
    throw std::invalid_argument("ratings_per_user exceeds the catalog");
  }
  PlantedGenome planted = MakePlantedGenome(config.movies, config.clusters, config.dim,
                                            config.genome_noise, config.seed);
  std::vector<std::vector<MovieId>> members(config.clusters);
  for (int m = 0; m < config.movies; ++m) members[planted.cluster_of[m]].push_back(m + 1);

  std::vector<Movie> movies;
  for (int m = 1; m <= config.movies; ++m) {
    const int year = 1950 + m % 70;
    movies.push_back({m, "Synthetic Movie " + std::to_string(m) + " (" + std::to_string(year) + ")",
                      "Drama", year});
  }

  Rng rng(Mix64(config.seed + 1));
  std::vector<double> quality(config.movies);
  for (double& q : quality) q = rng.Normal(0.0, config.quality_sd);
  std::vector<RatingEvent> ratings;
  const int favourite_count = std::min(3, config.clusters);
  std::vector<double> affinity(config.clusters);
  std::vector<int> order(config.clusters);
  for (int u = 1; u <= config.users; ++u) {
    const double bias = rng.Normal(0.0, config.user_bias_sd);
    for (double& a : affinity) a = rng.Normal(0.0, config.cluster_affinity_sd);
    for (int c = 0; c < config.clusters; ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return affinity[a] > affinity[b]; });
    const double focus = rng.Uniform();
    std::set<MovieId> rated;
    Timestamp t = 1'500'000'000 + static_cast<Timestamp>(u) * 1000;
    while (static_cast<int>(rated.size()) < config.ratings_per_user) {
      MovieId movie;
      if (rng.Uniform() < focus) {
        const auto& pool = members[order[rng.Below(favourite_count)]];
        movie = pool[rng.Below(pool.size())];
      } else {
        movie = static_cast<MovieId>(rng.Below(config.movies)) + 1;
      }
      if (!rated.insert(movie).second) continue;
      const double value =
          RoundHalfStar(3.2 + quality[movie - 1] + bias +
                        affinity[planted.cluster_of[movie - 1]] +
                        rng.Normal(0.0, config.noise_sd));
      ratings.push_back({u, movie, value, t++});
    }
  }
  SyntheticCorpus out;
  out.users = static_cast<std::size_t>(config.users);
  out.ratings = ratings.size();
  out.planted_cluster = planted.cluster_of;
  out.corpus = Corpus(std::move(movies), std::move(ratings), std::move(planted.genome));
  return out;
}

std::vector<SimWindow> SimulationConfig::DefaultWindows() {
  return {
      {"pre", ParseDateRange("2022-09-23..2022-11-03"), false},
      {"during", ParseDateRange("2022-11-04..2022-12-16"), true},
      {"post", ParseDateRange("2022-12-17..2023-03-16"), false},
  };
}

SimulationResult Simulate(const SimulationConfig& config) {
  if (config.users_per_arm < 0) throw std::invalid_argument("users_per_arm must be >= 0");
  if (config.timeout_minutes < 1) throw std::invalid_argument("timeout must be positive");
  SimulationResult out;
  const PlantedGenome planted =
      MakePlantedGenome(config.catalog_size, std::min(config.genome_clusters, config.catalog_size),
                        config.genome_dim, 0.08, Mix64(config.seed ^ 0x67656e6f6d65ull));
  out.genome = planted.genome;
  for (int m = 1; m <= config.catalog_size; ++m) {
    out.movies.push_back({m, "Catalog Movie " + std::to_string(m), "Drama", std::nullopt});
  }

  const Timestamp timeout = static_cast<Timestamp>(config.timeout_minutes) * 60;
  const Timestamp max_gap = std::min<Timestamp>(600, timeout - 1);
  const Timestamp min_gap = std::min<Timestamp>(5, max_gap);
  UserId next_user = 1;
  for (Cohort cohort : kCohorts) {
    for (Treatment treatment : kTreatments) {
      const Arm arm{cohort, treatment};
      for (int i = 0; i < config.users_per_arm; ++i) {
        const UserId user = next_user++;
        out.arms[user] = arm;
        Rng rng = StreamFor(config.seed, static_cast<std::uint64_t>(user));
        const double activity = std::exp(rng.Normal(0.0, config.user_heterogeneity));
        bool acknowledged = false;
        std::uint64_t session_serial = 0;

        for (const auto& sw : config.windows) {
          const EffectiveRates r = RatesFor(config, arm, sw.name);
          const Window& w = sw.window;
          const Timestamp span = w.end - w.start;
          // Each session needs room for itself plus a timeout-long gap.
          const Timestamp min_slot = 2 * timeout + 1200;
          const std::int64_t capacity = span / min_slot;
          std::int64_t sessions =
              rng.Poisson(r.login * activity * w.Days() / 30.0);
          sessions = std::min(sessions, capacity);
          WindowTally tally;
          const bool live = sw.interface_active;
          for (std::int64_t s = 0; s < sessions; ++s) {
            const Timestamp slot = span / sessions;
            const Timestamp slot_start = w.start + s * slot;
            const Timestamp deadline = slot_start + slot - timeout - 1;
            Timestamp t = slot_start + static_cast<Timestamp>(rng.Below(
                                           static_cast<std::uint64_t>(std::max<Timestamp>(1, slot / 4))));
            const std::string token =
                "sim-" + std::to_string(user) + "-" + std::to_string(++session_serial);
            std::vector<InteractionEvent> emitted;
            auto emit = [&](InteractionEvent e) {
              e.user_id = user;
              e.token = token;
              e.timestamp = t;
              emitted.push_back(std::move(e));
            };
            emit({.kind = EventKind::kLogin});

            if (live && !acknowledged) {
              t += min_gap;
              emit({.kind = EventKind::kInfoAck});
              acknowledged = true;
            }

            std::vector<Action> actions;
            auto add = [&](Action a, double mean) {
              for (int k = rng.Poisson(mean * activity); k > 0; --k) actions.push_back(a);
            };
            add(Action::kPageView, r.page_view);
            add(Action::kWishlist, r.wishlist);
            add(Action::kRating, r.rating);
            if (live && treatment == Treatment::kBrcDs) add(Action::kSlider, r.slider);
            if (live && treatment != Treatment::kControl) add(Action::kCarousel, r.carousel);
            rng.Shuffle(std::span<Action>(actions));

            std::set<MovieId> viewed;
            std::set<MovieId> wished;
            std::vector<MovieId> viewed_order;
            for (Action a : actions) {
              const Timestamp gap =
                  min_gap + static_cast<Timestamp>(rng.Below(static_cast<std::uint64_t>(max_gap - min_gap + 1)));
              if (t + gap > deadline) break;
              t += gap;
              const MovieId random_movie =
                  static_cast<MovieId>(rng.Below(static_cast<std::uint64_t>(config.catalog_size))) + 1;
              switch (a) {
                case Action::kPageView: {
                  // Revisit an earlier card now and then.
                  MovieId movie = random_movie;
                  if (!viewed_order.empty() && rng.Uniform() < 0.3) {
                    movie = viewed_order[rng.Below(viewed_order.size())];
                  }
                  viewed_order.push_back(movie);
                  viewed.insert(movie);
                  emit({.kind = EventKind::kPageView, .movie_id = movie});
                  break;
                }
                case Action::kWishlist: {
                  MovieId movie = random_movie;
                  if (!wished.empty() && rng.Uniform() < 0.2) movie = *wished.begin();
                  wished.insert(movie);
                  emit({.kind = EventKind::kWishlistAdd, .movie_id = movie});
                  break;
                }
                case Action::kRating: {
                  MovieId movie = random_movie;
                  if (!tally.latest_rating.empty() && rng.Uniform() < 0.1) {
                    movie = tally.latest_rating.begin()->first;
                  }
                  const double value = RoundHalfStar(rng.Normal(r.mean_rating, 0.8));
                  tally.latest_rating[movie] = value;
                  emit({.kind = EventKind::kRating, .movie_id = movie, .rating = value});
                  break;
                }
                case Action::kSlider: {
                  const int level = 1 + static_cast<int>(rng.Below(5));
                  ++tally.sliders;
                  emit({.kind = EventKind::kSliderSet, .level = level});
                  break;
                }
                case Action::kCarousel:
                  emit({.kind = EventKind::kCarouselClick, .treatment = treatment});
                  break;
              }
            }
            if (rng.Uniform() < config.rates.logout_probability && t + min_gap <= deadline) {
              t += min_gap;
              emit({.kind = EventKind::kLogout});
            }

            ++tally.sessions;
            tally.unique_views += static_cast<std::int64_t>(viewed.size());
            tally.unique_wishlist += static_cast<std::int64_t>(wished.size());
            tally.length_seconds += emitted.back().timestamp - emitted.front().timestamp;
            out.sessions.push_back({user, emitted.front().timestamp, emitted.back().timestamp,
                                    emitted.size()});
            for (auto& e : emitted) out.events.push_back(std::move(e));
          }
          out.truth[sw.name][user] = TallyToRecord(tally, w, out.genome);
        }
      }
    }
  }
  std::sort(out.events.begin(), out.events.end(), EventLess);
  std::sort(out.sessions.begin(), out.sessions.end(), [](const auto& a, const auto& b) {
    return std::tie(a.user_id, a.start) < std::tie(b.user_id, b.start);
  });
  return out;
}

std::vector<SurveyResponse> SimulateSurvey(const std::map<UserId, Arm>& arms,
                                           const SurveyConfig& config) {
  std::vector<SurveyResponse> out;
  // Centre the cutpoints on the average linear predictor so all three
  // satisfaction bins stay populated.
  const double centre = config.beta_interface * 1.5 + config.beta_habit * 1.5 +
                        config.beta_usage * 3.0;
  for (const auto& [user, arm] : arms) {
    Rng rng = StreamFor(config.seed, static_cast<std::uint64_t>(user), 0x7375727665ull);
    SurveyResponse r;
    r.user_id = user;
    for (std::size_t i = 0; i < kSurveyItems.size(); ++i) {
      r.scores[i] = 1 + static_cast<int>(rng.Below(5));
    }
    const int usage = r.scores[7];
    const double eta = config.beta_interface * InterfaceCode(arm.treatment) +
                       config.beta_habit * HabitCode(arm.cohort) + config.beta_usage * usage;
    double u;
    do {
      u = rng.Uniform();
    } while (u <= 0.0);
    const double latent = eta + std::log(u / (1.0 - u));
    int satisfaction;
    if (latent <= centre - 1.0) {
      satisfaction = rng.Uniform() < 0.5 ? 1 : 2;
    } else if (latent <= centre + 1.0) {
      satisfaction = 3;
    } else {
      satisfaction = rng.Uniform() < 0.5 ? 4 : 5;
    }
    r.scores[kSatisfactionItem] = satisfaction;
    if (arm.treatment == Treatment::kBrcDs) r.slider_level = 1 + static_cast<int>(rng.Below(5));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace divrec
