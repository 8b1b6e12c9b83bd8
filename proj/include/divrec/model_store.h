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

#ifndef DIVREC_MODEL_STORE_H_
#define DIVREC_MODEL_STORE_H_

#include <filesystem>
#include <memory>

#include "divrec/clustering.h"
#include "divrec/recommender.h"

namespace divrec {

// Snapshots are JSON documents carrying "schema_version" and "kind". Doubles
// are written with round-trip precision so a reload predicts identically.
inline constexpr int kModelSchemaVersion = 1;

void SaveRecommender(const Recommender& model, const std::filesystem::path& path);
// Throws DataError for unreadable files, unknown kinds or schema versions.
std::unique_ptr<Recommender> LoadRecommender(const std::filesystem::path& path);

void SaveClusterModel(const ClusterModel& model, const std::filesystem::path& path);
ClusterModel LoadClusterModel(const std::filesystem::path& path);

// Conventional file names under --model-dir.
std::filesystem::path RecommenderPath(const std::filesystem::path& model_dir,
                                      Algorithm algo);
std::filesystem::path ClusterModelPath(const std::filesystem::path& model_dir);

}  // namespace divrec

#endif  // DIVREC_MODEL_STORE_H_
