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

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <sys/wait.h>

#include "divrec/corpus.h"
#include "divrec/simulator.h"
#include "test_support.h"

namespace divrec {
namespace {

using testing::TempDir;

struct CliRun {
  int code = -1;
  std::string out;
};

// Runs the CLI with `args` (shell syntax), capturing stdout and stderr.
CliRun Cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + DIVREC_CLI_PATH + " " + args + " 2>&1";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Quote(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

TEST(CliTest, HelpForEverySubcommand) {
  EXPECT_EQ(Cli("--help").code, 0);
  for (const char* sub : {"ingest", "train", "cluster", "rerank", "diversity", "cohorts", "assign",
                          "serve", "simulate", "analyze", "pipeline"}) {
    const CliRun r = Cli(std::string(sub) + " --help");
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("--"), std::string::npos) << sub;
  }
}

TEST(CliTest, BadInvocationsExitOne) {
  EXPECT_EQ(Cli("").code, 1);
  EXPECT_EQ(Cli("frobnicate").code, 1);
  EXPECT_EQ(Cli("train --bogus").code, 1);
  EXPECT_EQ(Cli("rerank --user 1 --level 6").code, 1);
  TempDir dir;
  const CliRun missing = Cli("ingest --data-dir " + Quote(dir / "nope"));
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.out.find("error"), std::string::npos);
}

class CliCorpusTest : public ::testing::Test {
 protected:
  CliCorpusTest() {
    SyntheticCorpusConfig cc;
    cc.users = 60;
    cc.movies = 300;
    cc.dim = 32;
    cc.seed = 2;
    MakeSyntheticCorpus(cc).corpus.WriteDirectory(dir_ / "data");
  }
  std::string Common(const std::string& models) const {
    return "--data-dir " + Quote(dir_ / "data") + " --model-dir " + Quote(dir_ / models) +
           " --genome-dim 32";
  }
  TempDir dir_;
};

TEST_F(CliCorpusTest, SeedIsRequiredForStochasticStages) {
  const CliRun r = Cli("train " + Common("m"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("--seed is required"), std::string::npos);
}

TEST_F(CliCorpusTest, FlagBeatsEnvironmentBeatsFile) {
  testing::WriteText(dir_ / "c.json", R"({"data_dir": "/nonexistent/file"})");
  // File alone points nowhere.
  EXPECT_EQ(Cli("ingest --config " + Quote(dir_ / "c.json") + " --model-dir " + Quote(dir_ / "m")).code, 1);
  // Environment overrides the file.
  const std::string env = "DIVREC_DATA_DIR=" + Quote(dir_ / "data") + " DIVREC_GENOME_DIM=32";
  EXPECT_EQ(Cli("ingest --config " + Quote(dir_ / "c.json") + " --model-dir " + Quote(dir_ / "m"), env).code, 0);
  // The flag overrides the environment.
  EXPECT_EQ(Cli("ingest --data-dir /nonexistent/flag --model-dir " + Quote(dir_ / "m"), env).code, 1);
}

TEST_F(CliCorpusTest, StagesProduceArtifacts) {
  const std::string c = Common("m");
  ASSERT_EQ(Cli("ingest " + c).code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "m" / "manifest-ingest.json"));
  for (const char* algo : {"peasant", "warrior", "wizard"}) {
    const CliRun r = Cli(std::string("train --algo ") + algo + " --seed 3 --features 5 --epochs 20 " + c);
    EXPECT_EQ(r.code, 0) << algo << r.out;
  }
  ASSERT_EQ(Cli("cluster --seed 3 " + c).code, 0);
  const CliRun pages = Cli("rerank --algo wizard --user 1 --level 2 " + c);
  ASSERT_EQ(pages.code, 0) << pages.out;
  EXPECT_EQ(std::count(pages.out.begin(), pages.out.end(), '\n'), 3);
  EXPECT_NE(pages.out.find("\"level\":2"), std::string::npos);
  EXPECT_EQ(Cli("diversity --user 1 " + c).code, 0);
  ASSERT_EQ(Cli("cohorts --out " + Quote(dir_ / "cohorts.csv") + " " + c).code, 0);
  EXPECT_EQ(testing::CountLines(dir_ / "cohorts.csv"), 61u);
  ASSERT_EQ(Cli("assign --cohorts " + Quote(dir_ / "cohorts.csv") + " --out " +
                Quote(dir_ / "arms.csv") + " " + c).code, 0);
  EXPECT_EQ(testing::CountLines(dir_ / "arms.csv"), 61u);
}

TEST_F(CliCorpusTest, PipelineIsReproducible) {
  for (const char* run : {"a", "b"}) {
    const CliRun r = Cli("pipeline --seed 9 --algo peasant --out " + Quote(dir_ / run) + " " +
                      Common(std::string("models_") + run));
    ASSERT_EQ(r.code, 0) << r.out;
  }
  for (const char* rel : {"simulation/manifest-simulate.json", "report/manifest-analyze.json",
                          "report/summary.txt", "report/pairwise.csv", "report/olr.csv"}) {
    const std::string a = testing::ReadText(dir_ / "a" / rel);
    EXPECT_FALSE(a.empty()) << rel;
    EXPECT_EQ(a, testing::ReadText(dir_ / "b" / rel)) << rel;
  }
  EXPECT_EQ(testing::ReadText(dir_ / "models_a" / "manifest-cluster.json"),
            testing::ReadText(dir_ / "models_b" / "manifest-cluster.json"));
}

TEST_F(CliCorpusTest, SimulateAndAnalyzeWithPlantedShift) {
  const std::string sim = Quote(dir_ / "sim");
  ASSERT_EQ(Cli("simulate --seed 1 --catalog 200 --users-per-arm 150 --genome-dim 32 --shift "
                "D-BRC:during:page_view:1.8 --out " + sim).code, 0);
  const CliRun r = Cli("analyze --genome-dim 32 --data-dir " + sim + " --events " +
                    Quote(dir_ / "sim" / "events.jsonl") + " --arms " + Quote(dir_ / "sim" / "arms.csv") +
                    " --during 2022-11-04..2022-12-16 --out " + Quote(dir_ / "report"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("during pageViewFreq"), std::string::npos) << r.out;
  EXPECT_EQ(Cli("simulate --seed 1 --shift nonsense --out " + sim).code, 1);
}

}  // namespace
}  // namespace divrec
