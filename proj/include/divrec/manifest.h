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

#ifndef DIVREC_MANIFEST_H_
#define DIVREC_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace divrec {

// Hex SHA-256 of a file's bytes.
std::string Sha256File(const std::filesystem::path& path);
std::string Sha256Hex(std::string_view bytes);

struct ManifestEntry {
  std::string name;  // file name, without directories
  std::string sha256;
  bool operator==(const ManifestEntry&) const = default;
};

// What a pipeline stage read, wrote and with which settings. Contains no
// timestamps or absolute paths, so identical runs give identical bytes.
struct Manifest {
  std::string stage;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> params;
  std::vector<ManifestEntry> inputs;
  std::vector<ManifestEntry> outputs;

  void AddInput(const std::filesystem::path& path);
  void AddOutput(const std::filesystem::path& path);
  std::string ToJson() const;
  bool operator==(const Manifest&) const = default;
};

// Writes `dir`/manifest-<stage>.json and returns its path.
std::filesystem::path WriteManifest(const Manifest& manifest, const std::filesystem::path& dir);

}  // namespace divrec

#endif  // DIVREC_MANIFEST_H_
