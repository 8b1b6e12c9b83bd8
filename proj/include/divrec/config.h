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

#ifndef DIVREC_CONFIG_H_
#define DIVREC_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace divrec {

// Settings shared by the CLI subcommands and the server.
//
// Precedence, highest first: command-line flag, environment variable,
// config file (--config, JSON), built-in default.
//
//   key               env var                  default
//   data_dir          DIVREC_DATA_DIR          data
//   model_dir         DIVREC_MODEL_DIR         models
//   algo              DIVREC_ALGO              wizard
//   seed              DIVREC_SEED              (none)
//   arm_seed          DIVREC_ARM_SEED          0
//   k                 DIVREC_K                 24
//   pool_size         DIVREC_POOL_SIZE         600
//   session_timeout   DIVREC_SESSION_TIMEOUT   30 (minutes)
//   host              DIVREC_HOST              127.0.0.1
//   port              DIVREC_PORT              8080
//   genome_dim        DIVREC_GENOME_DIM        1128
struct RunConfig {
  std::filesystem::path data_dir = "data";
  std::filesystem::path model_dir = "models";
  std::string algo = "wizard";
  std::optional<std::uint64_t> seed;
  std::uint64_t arm_seed = 0;
  int k = 24;
  std::size_t pool_size = 600;
  int session_timeout = 30;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t genome_dim = 1128;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> ProcessEnv(const std::string& name);

// Applies the config file (if any), then the environment, over defaults.
RunConfig LoadRunConfig(const std::optional<std::filesystem::path>& file,
                        const EnvLookup& env = ProcessEnv);

}  // namespace divrec

#endif  // DIVREC_CONFIG_H_
