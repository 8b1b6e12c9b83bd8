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

#include <gtest/gtest.h>

#include <map>

#include "divrec/manifest.h"
#include "test_support.h"

namespace divrec {
namespace {

using testing::TempDir;
using testing::WriteText;

EnvLookup FakeEnv(std::map<std::string, std::string> vars) {
  return [vars](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

TEST(RunConfigTest, Defaults) {
  const RunConfig c = LoadRunConfig(std::nullopt, FakeEnv({}));
  EXPECT_EQ(c.data_dir, "data");
  EXPECT_EQ(c.algo, "wizard");
  EXPECT_FALSE(c.seed.has_value());
  EXPECT_EQ(c.k, 24);
  EXPECT_EQ(c.pool_size, 600u);
  EXPECT_EQ(c.session_timeout, 30);
  EXPECT_EQ(c.port, 8080);
  EXPECT_EQ(c.genome_dim, 1128u);
}

TEST(RunConfigTest, EnvironmentOverridesFileOverridesDefault) {
  TempDir dir;
  WriteText(dir / "c.json", R"({"algo": "peasant", "k": 12, "seed": 5, "host": "0.0.0.0"})");
  const RunConfig file_only = LoadRunConfig(dir / "c.json", FakeEnv({}));
  EXPECT_EQ(file_only.algo, "peasant");
  EXPECT_EQ(file_only.k, 12);
  EXPECT_EQ(file_only.seed, 5u);
  EXPECT_EQ(file_only.port, 8080);  // untouched default

  const RunConfig both =
      LoadRunConfig(dir / "c.json", FakeEnv({{"DIVREC_K", "7"}, {"DIVREC_PORT", "9000"}}));
  EXPECT_EQ(both.k, 7);
  EXPECT_EQ(both.port, 9000);
  EXPECT_EQ(both.algo, "peasant");
  EXPECT_EQ(both.host, "0.0.0.0");
}

TEST(RunConfigTest, Errors) {
  TempDir dir;
  WriteText(dir / "bad_key.json", R"({"colour": "blue"})");
  EXPECT_THROW(LoadRunConfig(dir / "bad_key.json", FakeEnv({})), ConfigError);
  WriteText(dir / "bad_json.json", "{");
  EXPECT_THROW(LoadRunConfig(dir / "bad_json.json", FakeEnv({})), ConfigError);
  WriteText(dir / "array.json", "[1]");
  EXPECT_THROW(LoadRunConfig(dir / "array.json", FakeEnv({})), ConfigError);
  EXPECT_THROW(LoadRunConfig(dir / "missing.json", FakeEnv({})), ConfigError);
  EXPECT_THROW(LoadRunConfig(std::nullopt, FakeEnv({{"DIVREC_K", "twelve"}})), ConfigError);
  EXPECT_THROW(LoadRunConfig(std::nullopt, FakeEnv({{"DIVREC_SEED", "-1"}})), ConfigError);
}

TEST(ManifestTest, Sha256KnownVectors) {
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(Sha256Hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  TempDir dir;
  WriteText(dir / "abc.txt", "abc");
  EXPECT_EQ(Sha256File(dir / "abc.txt"), Sha256Hex("abc"));
}

TEST(ManifestTest, DeterministicAndPathFree) {
  TempDir dir;
  WriteText(dir / "in.csv", "a,b\n");
  WriteText(dir / "out.csv", "c\n");
  auto build = [&] {
    Manifest m{.stage = "demo", .seed = 3};
    m.params["z"] = "1";
    m.params["a"] = "2";
    m.AddInput(dir / "in.csv");
    m.AddOutput(dir / "out.csv");
    return m;
  };
  const Manifest a = build(), b = build();
  EXPECT_EQ(a.ToJson(), b.ToJson());
  EXPECT_EQ(a.inputs[0].name, "in.csv");
  EXPECT_EQ(a.ToJson().find(dir.path().string()), std::string::npos);
  const auto path = WriteManifest(a, dir / "m");
  EXPECT_EQ(path.filename(), "manifest-demo.json");
  EXPECT_EQ(testing::ReadText(path).find(a.ToJson()), 0u);
}

}  // namespace
}  // namespace divrec
