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

#include "divrec/config.h"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

namespace divrec {
namespace {

using nlohmann::json;

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size() || v < 0) throw std::invalid_argument(text);
    return static_cast<T>(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
}

void Apply(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "data_dir") c.data_dir = value;
  else if (key == "model_dir") c.model_dir = value;
  else if (key == "algo") c.algo = value;
  else if (key == "seed") c.seed = ParseNumber<std::uint64_t>(key, value);
  else if (key == "arm_seed") c.arm_seed = ParseNumber<std::uint64_t>(key, value);
  else if (key == "k") c.k = ParseNumber<int>(key, value);
  else if (key == "pool_size") c.pool_size = ParseNumber<std::size_t>(key, value);
  else if (key == "session_timeout") c.session_timeout = ParseNumber<int>(key, value);
  else if (key == "host") c.host = value;
  else if (key == "port") c.port = ParseNumber<int>(key, value);
  else if (key == "genome_dim") c.genome_dim = ParseNumber<std::size_t>(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

constexpr const char* kKeys[] = {"data_dir",  "model_dir", "algo",
                                 "seed",      "arm_seed",  "k",
                                 "pool_size", "session_timeout", "host",
                                 "port",      "genome_dim"};

}  // namespace

std::optional<std::string> ProcessEnv(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

RunConfig LoadRunConfig(const std::optional<std::filesystem::path>& file, const EnvLookup& env) {
  RunConfig c;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot open config file " + file->string());
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(file->string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(file->string() + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
      Apply(c, key, value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  for (const char* key : kKeys) {
    std::string name = "DIVREC_";
    for (const char* p = key; *p; ++p) name += static_cast<char>(std::toupper(*p));
    if (auto v = env(name)) Apply(c, key, *v);
  }
  return c;
}

}  // namespace divrec
