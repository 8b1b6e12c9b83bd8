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

#include "divrec/manifest.h"

#include <fstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "divrec/types.h"

namespace divrec {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("SHA-256 initialisation failed");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void Update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }

  std::string HexDigest() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, digest, &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[digest[i] >> 4];
      out += kHex[digest[i] & 15];
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

ManifestEntry Entry(const std::filesystem::path& path) {
  return {path.filename().string(), Sha256File(path)};
}

}  // namespace

std::string Sha256Hex(std::string_view bytes) {
  Sha256 h;
  h.Update(bytes.data(), bytes.size());
  return h.HexDigest();
}

std::string Sha256File(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  Sha256 h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h.Update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.HexDigest();
}

void Manifest::AddInput(const std::filesystem::path& path) { inputs.push_back(Entry(path)); }
void Manifest::AddOutput(const std::filesystem::path& path) { outputs.push_back(Entry(path)); }

std::string Manifest::ToJson() const {
  using nlohmann::ordered_json;
  auto entries = [](const std::vector<ManifestEntry>& list) {
    ordered_json a = ordered_json::array();
    for (const auto& e : list) a.push_back({{"name", e.name}, {"sha256", e.sha256}});
    return a;
  };
  ordered_json j;
  j["stage"] = stage;
  j["seed"] = seed ? ordered_json(*seed) : ordered_json();
  j["params"] = params;
  j["inputs"] = entries(inputs);
  j["outputs"] = entries(outputs);
  return j.dump(2) + "\n";
}

std::filesystem::path WriteManifest(const Manifest& manifest, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / ("manifest-" + manifest.stage + ".json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << manifest.ToJson();
  return path;
}

}  // namespace divrec
