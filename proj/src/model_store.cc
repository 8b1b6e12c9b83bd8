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

#include "divrec/model_store.h"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

namespace divrec {
namespace {

using nlohmann::json;

template <typename Map>
std::vector<typename Map::key_type> SortedKeys(const Map& m) {
  std::vector<typename Map::key_type> keys;
  keys.reserve(m.size());
  for (const auto& [k, v] : m) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  return keys;
}

json MatrixToJson(const DenseMatrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

DenseMatrix MatrixFromJson(const json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) throw DataError("matrix payload size mismatch");
  DenseMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(data.begin() + r * cols, cols, m.row(r).begin());
  }
  return m;
}

json PopularityToJson(const PopularityModel& m) {
  json movies = json::array();
  for (MovieId id : SortedKeys(m.movies())) {
    const auto& s = m.movies().at(id);
    movies.push_back({id, s.mean, s.count});
  }
  return json{{"global_mean", m.global_mean()}, {"movies", movies}};
}

PopularityModel PopularityFromJson(const json& j) {
  std::unordered_map<MovieId, PopularityModel::MovieStats> movies;
  for (const auto& row : j.at("movies")) {
    movies[row.at(0).get<MovieId>()] = {row.at(1).get<double>(),
                                        row.at(2).get<std::int64_t>()};
  }
  return PopularityModel(j.at("global_mean").get<double>(), std::move(movies));
}

void WriteJson(const json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump() << '\n';
}

json ReadJson(const std::filesystem::path& path, std::string_view kind) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (j.value("schema_version", -1) != kModelSchemaVersion) {
    throw DataError(path.string() + ": unsupported schema_version");
  }
  if (j.value("kind", std::string()) != kind) {
    throw DataError(path.string() + ": expected a " + std::string(kind) + " snapshot");
  }
  return j;
}

}  // namespace

void SaveRecommender(const Recommender& model, const std::filesystem::path& path) {
  json j{{"schema_version", kModelSchemaVersion},
         {"kind", "recommender"},
         {"algo", AlgorithmName(model.algorithm())}};
  switch (model.algorithm()) {
    case Algorithm::kPeasant:
      j["popularity"] = PopularityToJson(static_cast<const PopularityModel&>(model));
      break;
    case Algorithm::kWarrior: {
      const auto& s = static_cast<const ItemItemModel&>(model).state();
      j["neighborhood_size"] = s.neighborhood_size;
      j["popularity"] = PopularityToJson(s.popularity);
      json neighbors = json::array();
      for (MovieId id : SortedKeys(s.neighbors)) {
        json list = json::array();
        for (const auto& n : s.neighbors.at(id)) list.push_back({n.movie_id, n.similarity});
        neighbors.push_back({id, list});
      }
      j["neighbors"] = neighbors;
      json users = json::array();
      for (UserId id : SortedKeys(s.user_means)) {
        json rated = json::array();
        const auto& ratings = s.user_ratings.at(id);
        for (MovieId movie : SortedKeys(ratings)) rated.push_back({movie, ratings.at(movie)});
        users.push_back({id, s.user_means.at(id), rated});
      }
      j["users"] = users;
      break;
    }
    case Algorithm::kWizard: {
      const auto& s = static_cast<const FunkSvdModel&>(model).state();
      j["global_mean"] = s.global_mean;
      j["users"] = s.users;
      j["movies"] = s.movies;
      j["user_bias"] = s.user_bias;
      j["item_bias"] = s.item_bias;
      j["user_factors"] = MatrixToJson(s.user_factors);
      j["item_factors"] = MatrixToJson(s.item_factors);
      j["popularity"] = PopularityToJson(s.popularity);
      break;
    }
  }
  WriteJson(j, path);
}

std::unique_ptr<Recommender> LoadRecommender(const std::filesystem::path& path) {
  const json j = ReadJson(path, "recommender");
  try {
    switch (ParseAlgorithm(j.at("algo").get<std::string>())) {
      case Algorithm::kPeasant:
        return std::make_unique<PopularityModel>(PopularityFromJson(j.at("popularity")));
      case Algorithm::kWarrior: {
        ItemItemModel::State s;
        s.neighborhood_size = j.at("neighborhood_size").get<int>();
        s.popularity = PopularityFromJson(j.at("popularity"));
        for (const auto& entry : j.at("neighbors")) {
          auto& list = s.neighbors[entry.at(0).get<MovieId>()];
          for (const auto& n : entry.at(1)) {
            list.push_back({n.at(0).get<MovieId>(), n.at(1).get<double>()});
          }
        }
        for (const auto& entry : j.at("users")) {
          const UserId user = entry.at(0).get<UserId>();
          s.user_means[user] = entry.at(1).get<double>();
          auto& rated = s.user_ratings[user];
          for (const auto& r : entry.at(2)) rated[r.at(0).get<MovieId>()] = r.at(1).get<double>();
        }
        return std::make_unique<ItemItemModel>(std::move(s));
      }
      case Algorithm::kWizard: {
        FunkSvdModel::State s;
        s.global_mean = j.at("global_mean").get<double>();
        s.users = j.at("users").get<std::vector<UserId>>();
        s.movies = j.at("movies").get<std::vector<MovieId>>();
        s.user_bias = j.at("user_bias").get<std::vector<double>>();
        s.item_bias = j.at("item_bias").get<std::vector<double>>();
        s.user_factors = MatrixFromJson(j.at("user_factors"));
        s.item_factors = MatrixFromJson(j.at("item_factors"));
        s.popularity = PopularityFromJson(j.at("popularity"));
        return std::make_unique<FunkSvdModel>(std::move(s));
      }
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  throw DataError(path.string() + ": unknown algorithm");
}

void SaveClusterModel(const ClusterModel& model, const std::filesystem::path& path) {
  json j{{"schema_version", kModelSchemaVersion},
         {"kind", "clusters"},
         {"k", model.k()},
         {"centroids", MatrixToJson(model.centroids())},
         {"movies", model.movies()},
         {"assignment", model.assignment()},
         {"rating_counts", model.rating_counts()},
         {"objective_history", model.objective_history()}};
  WriteJson(j, path);
}

ClusterModel LoadClusterModel(const std::filesystem::path& path) {
  const json j = ReadJson(path, "clusters");
  try {
    ClusterModel model(MatrixFromJson(j.at("centroids")),
                       j.at("movies").get<std::vector<MovieId>>(),
                       j.at("assignment").get<std::vector<int>>());
    model.SetRatingCounts(j.at("rating_counts").get<std::vector<std::int64_t>>());
    model.set_objective_history(j.at("objective_history").get<std::vector<double>>());
    return model;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::filesystem::path RecommenderPath(const std::filesystem::path& model_dir,
                                      Algorithm algo) {
  return model_dir / ("model-" + std::string(AlgorithmName(algo)) + ".json");
}

std::filesystem::path ClusterModelPath(const std::filesystem::path& model_dir) {
  return model_dir / "clusters.json";
}

}  // namespace divrec
