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

#ifndef DIVREC_TESTS_SERVICE_FIXTURE_H_
#define DIVREC_TESTS_SERVICE_FIXTURE_H_

#include <map>
#include <memory>

#include "divrec/clustering.h"
#include "divrec/recommender.h"
#include "divrec/service.h"
#include "divrec/simulator.h"

namespace divrec::testing {

// Small trained world: 60 users, 600 movies, 24 clusters. Users 1..6 are
// enrolled, one per arm (D-Control, D-BRC, D-BRC_DS, ND-Control, ...).
struct ServiceWorld {
  Corpus corpus;
  std::shared_ptr<const Engine> engine;
  std::map<UserId, Arm> arms;

  static const ServiceWorld& Get() {
    static const ServiceWorld* world = new ServiceWorld();
    return *world;
  }

  UserId UserFor(Cohort c, Treatment t) const {
    for (const auto& [u, a] : arms) {
      if (a.cohort == c && a.treatment == t) return u;
    }
    return 0;
  }

 private:
  ServiceWorld() {
    SyntheticCorpusConfig cc;
    cc.users = 60;
    cc.movies = 600;
    cc.dim = 32;
    cc.seed = 8;
    corpus = MakeSyntheticCorpus(cc).corpus;
    auto model = std::make_shared<FunkSvdModel>(
        TrainFunkSvd(corpus.ratings(), {.features = 8, .epochs_per_feature = 30}));
    ClusterModel clusters = ClusterGenome(corpus.genome(), {.k = 24, .seed = 8});
    clusters.SetRatingCounts(CountClusterRatings(clusters, corpus.ratings()));
    engine = MakeEngine(model, clusters, corpus.ratings());
    UserId u = 1;
    for (Cohort c : kCohorts) {
      for (Treatment t : kTreatments) arms[u++] = {c, t};
    }
  }
};

}  // namespace divrec::testing

#endif  // DIVREC_TESTS_SERVICE_FIXTURE_H_
