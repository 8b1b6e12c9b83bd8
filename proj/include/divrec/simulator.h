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

#ifndef DIVREC_SIMULATOR_H_
#define DIVREC_SIMULATOR_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "divrec/analysis.h"
#include "divrec/corpus.h"
#include "divrec/experiment.h"

namespace divrec {

// ---------------------------------------------------------------------------
// Synthetic corpora

// Movies drawn around `clusters` random prototypes in [0,1]^dim with
// Gaussian noise, clamped to [0,1]. Movie ids are 1..movies.
struct PlantedGenome {
  GenomeTable genome;
  std::vector<int> cluster_of;  // planted cluster per genome row
  DenseMatrix prototypes;
};

PlantedGenome MakePlantedGenome(int movies, int clusters, std::size_t dim, double noise,
                                std::uint64_t seed);

struct SyntheticCorpusConfig {
  int users = 200;
  int movies = 1000;
  int clusters = 24;
  std::size_t dim = kGenomeDim;
  double genome_noise = 0.08;
  int ratings_per_user = 40;
  double quality_sd = 0.5;         // per-movie quality
  double user_bias_sd = 0.3;
  double cluster_affinity_sd = 0.3;  // per (user, planted cluster) taste
  double noise_sd = 0.5;
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  Corpus corpus;
  std::vector<int> planted_cluster;  // by genome row
  // Generator bookkeeping.
  std::size_t users = 0;
  std::size_t ratings = 0;
};

// rating = 3.2 + quality + user bias + cluster affinity + noise, rounded to
// the half-star grid. Each user has a random focus in [0,1]: the chance a
// rated movie comes from one of their three favourite clusters, so history
// diversity varies across users. Ratings are distinct movies per user.
SyntheticCorpus MakeSyntheticCorpus(const SyntheticCorpusConfig& config);

// ---------------------------------------------------------------------------
// Interaction simulator

struct BehaviorRates {
  double logins_per_month = 6.0;
  double page_views_per_session = 4.0;
  double wishlist_per_session = 0.8;
  double ratings_per_session = 2.0;
  double sliders_per_session = 0.6;    // BRC_DS while the interface is live
  double carousel_clicks_per_session = 0.5;
  double mean_rating = 3.6;
  double logout_probability = 0.5;
};

// Multiplies one rate for one arm within one window. `rate` is one of
// login, page_view, wishlist, rating, slider, carousel, mean_rating.
struct RateShift {
  Arm arm;
  std::string window;
  std::string rate;
  double multiplier = 1.0;
};

struct SimWindow {
  std::string name;
  Window window;
  bool interface_active = false;
};

struct SimulationConfig {
  int users_per_arm = 300;
  std::vector<SimWindow> windows = DefaultWindows();
  BehaviorRates rates;
  std::vector<RateShift> shifts;
  double user_heterogeneity = 0.3;  // sd of the per-user log activity factor
  int catalog_size = 2000;
  int genome_clusters = 24;
  std::size_t genome_dim = kGenomeDim;
  int timeout_minutes = kDefaultSessionTimeoutMinutes;
  std::uint64_t seed = 0;

  // pre: six weeks before launch; during: 2022-11-04..2022-12-16;
  // post: three months after.
  static std::vector<SimWindow> DefaultWindows();
};

struct SessionTruth {
  UserId user_id = 0;
  Timestamp start = 0;
  Timestamp end = 0;
  std::size_t events = 0;
  bool operator==(const SessionTruth&) const = default;
};

struct SimulationResult {
  std::map<UserId, Arm> arms;
  GenomeTable genome;
  std::vector<Movie> movies;
  std::vector<InteractionEvent> events;  // sorted by EventLess
  std::vector<SessionTruth> sessions;    // by (user, start)
  // window name -> user -> metrics, computed from the generator's own
  // bookkeeping rather than from the log.
  std::map<std::string, std::map<UserId, MetricsRecord>> truth;
};

// Users are numbered 1..6n in arm blocks (cohort-major). Per user and
// window the number of sessions is Poisson; each session starts with a login
// and is followed by its actions spaced under the timeout.
SimulationResult Simulate(const SimulationConfig& config);

// Planted survey: satisfaction follows a proportional-odds model on
// interface, habit and usage frequency; other items are independent noise.
struct SurveyConfig {
  double beta_interface = -0.7;
  double beta_habit = -1.0;
  double beta_usage = 0.9;
  std::uint64_t seed = 0;
};

std::vector<SurveyResponse> SimulateSurvey(const std::map<UserId, Arm>& arms,
                                           const SurveyConfig& config);

}  // namespace divrec

#endif  // DIVREC_SIMULATOR_H_
