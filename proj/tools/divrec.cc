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

// divrec command-line entry point.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <json.hpp>

#include "divrec/analysis.h"
#include "divrec/clustering.h"
#include "divrec/config.h"
#include "divrec/corpus.h"
#include "divrec/diversity.h"
#include "divrec/experiment.h"
#include "divrec/http_server.h"
#include "divrec/manifest.h"
#include "divrec/model_store.h"
#include "divrec/recommender.h"
#include "divrec/rerank.h"
#include "divrec/service.h"
#include "divrec/simulator.h"

namespace fs = std::filesystem;
using namespace divrec;

namespace {

// Raised for bad input the user can fix; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::optional<std::string> config;
  std::optional<std::string> data_dir;
  std::optional<std::string> model_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> genome_dim;
};

void AddCommon(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file (flags > env > file > defaults)");
  cmd->add_option("--data-dir", f.data_dir,
                  "directory with ratings.csv, movies.csv, genome-scores.csv, genome-tags.csv");
  cmd->add_option("--model-dir", f.model_dir, "directory for model snapshots and manifests");
  cmd->add_option("--genome-dim", f.genome_dim, "expected genome dimension (default 1128)");
}

RunConfig Resolve(const CommonFlags& f) {
  RunConfig c = LoadRunConfig(f.config ? std::optional<fs::path>(*f.config) : std::nullopt);
  if (f.data_dir) c.data_dir = *f.data_dir;
  if (f.model_dir) c.model_dir = *f.model_dir;
  if (f.seed) c.seed = *f.seed;
  if (f.genome_dim) c.genome_dim = *f.genome_dim;
  return c;
}

std::uint64_t RequireSeed(const RunConfig& c, const char* command) {
  if (!c.seed) throw UsageError(std::string(command) + ": --seed is required");
  return *c.seed;
}

Corpus LoadCorpus(const RunConfig& c) {
  std::vector<std::string> warnings;
  Corpus corpus = Corpus::LoadDirectory(c.data_dir, c.genome_dim, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return corpus;
}

void AddCorpusInputs(Manifest& m, const fs::path& dir) {
  for (const char* name : {"ratings.csv", "movies.csv", "genome-scores.csv", "genome-tags.csv"}) {
    if (fs::exists(dir / name)) m.AddInput(dir / name);
  }
}

nlohmann::json PageJson(const RecPage& page, int level) {
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& s : page.slots) {
    slots.push_back({{"movie_id", s.movie_id}, {"score", s.score}, {"cluster_id", s.cluster_id}});
  }
  return {{"page", page.page_index}, {"level", level}, {"degraded", page.degraded},
          {"slots", slots}};
}

// --------------------------------------------------------------------------
// Stages

int RunIngest(const RunConfig& c) {
  const Corpus corpus = LoadCorpus(c);
  const std::string summary = FormatSummary(Summarize(corpus));
  std::cout << summary;
  fs::create_directories(c.model_dir);
  const fs::path out = c.model_dir / "corpus-summary.txt";
  std::ofstream(out) << summary;
  Manifest m{.stage = "ingest"};
  AddCorpusInputs(m, c.data_dir);
  m.AddOutput(out);
  WriteManifest(m, c.model_dir);
  return 0;
}

struct TrainFlags {
  int features = 50;
  int epochs = 125;
  double learning_rate = 0.005;
  double regularization = 0.02;
  int neighbors = 30;
};

int RunTrain(const RunConfig& c, const TrainFlags& t) {
  const std::uint64_t seed = RequireSeed(c, "train");
  const Algorithm algo = ParseAlgorithm(c.algo);
  const Corpus corpus = LoadCorpus(c);
  const auto ratings = LatestRatings(corpus.ratings());
  std::unique_ptr<Recommender> model;
  Manifest m{.stage = "train-" + std::string(AlgorithmName(algo)), .seed = seed};
  switch (algo) {
    case Algorithm::kPeasant:
      model = std::make_unique<PopularityModel>(TrainPopularity(ratings));
      break;
    case Algorithm::kWarrior:
      model = std::make_unique<ItemItemModel>(TrainItemItem(ratings, t.neighbors));
      m.params["neighbors"] = std::to_string(t.neighbors);
      break;
    case Algorithm::kWizard: {
      FunkSvdConfig cfg;
      cfg.features = t.features;
      cfg.epochs_per_feature = t.epochs;
      cfg.learning_rate = t.learning_rate;
      cfg.regularization = t.regularization;
      cfg.seed = seed;
      model = std::make_unique<FunkSvdModel>(TrainFunkSvd(ratings, cfg));
      m.params["features"] = std::to_string(t.features);
      m.params["epochs_per_feature"] = std::to_string(t.epochs);
      m.params["learning_rate"] = nlohmann::json(t.learning_rate).dump();
      m.params["regularization"] = nlohmann::json(t.regularization).dump();
      break;
    }
  }
  const fs::path out = RecommenderPath(c.model_dir, algo);
  SaveRecommender(*model, out);
  AddCorpusInputs(m, c.data_dir);
  m.AddOutput(out);
  WriteManifest(m, c.model_dir);
  std::cout << "wrote " << out.string() << '\n';
  return 0;
}

int RunCluster(const RunConfig& c, int max_iters, const std::optional<std::string>& report) {
  const std::uint64_t seed = RequireSeed(c, "cluster");
  const Corpus corpus = LoadCorpus(c);
  ClusterModel model = ClusterGenome(corpus.genome(), {c.k, max_iters, seed});
  model.SetRatingCounts(CountClusterRatings(model, LatestRatings(corpus.ratings())));
  const fs::path out = ClusterModelPath(c.model_dir);
  SaveClusterModel(model, out);
  Manifest m{.stage = "cluster", .seed = seed, .params = {{"k", std::to_string(c.k)}}};
  AddCorpusInputs(m, c.data_dir);
  m.AddOutput(out);
  if (report) {
    std::ofstream rep(*report);
    if (!rep) throw UsageError("cannot write " + *report);
    const auto sizes = model.ClusterSizes();
    for (int k = 0; k < model.k(); ++k) {
      rep << "cluster " << k << " (" << sizes[k] << " movies, " << model.rating_counts()[k]
          << " ratings):";
      for (const auto& tag : TopTags(model, k, corpus.genome().tags(), 10)) rep << ' ' << tag.name << ';';
      rep << '\n';
    }
    rep.close();
    m.AddOutput(*report);
  }
  WriteManifest(m, c.model_dir);
  std::cout << "wrote " << out.string() << " (" << model.iterations() << " iterations)\n";
  return 0;
}

int RunRerank(const RunConfig& c, UserId user, int level_value) {
  const DiversityLevel level(level_value);
  const Corpus corpus = LoadCorpus(c);
  const auto model = LoadRecommender(RecommenderPath(c.model_dir, ParseAlgorithm(c.algo)));
  const ClusterModel clusters = LoadClusterModel(ClusterModelPath(c.model_dir));
  std::vector<MovieId> universe = clusters.movies();
  std::sort(universe.begin(), universe.end());
  const auto pool = TopN(*model, user, c.pool_size, universe, RatedMovies(corpus.ratings(), user));
  if (pool.fallback) std::cerr << "warning: user " << user << " unknown to the model\n";
  if (pool.items.empty()) throw UsageError("no candidates left for user " + std::to_string(user));
  const auto pages =
      RerankPages(pool.items, clusters, SelectClusterSubset(clusters, level), level);
  for (const auto& p : pages) std::cout << PageJson(p, level.value()).dump() << '\n';
  return 0;
}

int RunDiversity(const RunConfig& c, UserId user, const std::optional<std::string>& since) {
  const Corpus corpus = LoadCorpus(c);
  std::optional<Timestamp> from;
  if (since) from = ParseDate(*since);
  const auto score = UserHistoryDiversity(user, corpus.ratings(), corpus.genome(), from);
  if (!score) {
    std::cout << "user " << user << ": fewer than two rated movies with genome vectors\n";
    return 1;
  }
  std::cout << "user " << user << ": diversity " << score->value << '\n';
  if (score->zero_variance_pairs) {
    std::cerr << "warning: " << score->zero_variance_pairs << " zero-variance pairs\n";
  }
  return 0;
}

int RunCohorts(const RunConfig& c, const std::string& out, const std::optional<std::string>& since,
               bool activity_filter) {
  const Corpus corpus = LoadCorpus(c);
  std::optional<Timestamp> from;
  if (since) from = ParseDate(*since);
  std::map<UserId, int> rating_counts;
  for (const auto& r : corpus.ratings()) ++rating_counts[r.user_id];
  std::vector<UserScore> scores;
  std::size_t excluded = 0;
  for (const auto& [user, count] : rating_counts) {
    // Login counts are not in the ratings corpus; only the rating half of
    // the activity criterion can be applied here.
    if (activity_filter && count < kMinRatings) {
      ++excluded;
      continue;
    }
    if (auto s = UserHistoryDiversity(user, corpus.ratings(), corpus.genome(), from)) {
      scores.push_back({user, s->value});
    } else {
      ++excluded;
    }
  }
  const CohortSplit split = SplitCohorts(scores);
  std::vector<CohortRow> rows;
  for (const auto& u : split.diverse) rows.push_back({u.user_id, u.score, Cohort::kDiverse});
  for (const auto& u : split.non_diverse) rows.push_back({u.user_id, u.score, Cohort::kNonDiverse});
  std::sort(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.user_id < b.user_id; });
  WriteCohorts(rows, out);
  std::cout << "D=" << split.diverse.size() << " ND=" << split.non_diverse.size()
            << " threshold=" << split.threshold << " excluded=" << excluded << '\n';
  return 0;
}

int RunAssign(const RunConfig& c, const std::string& cohorts_path, const std::string& out) {
  std::map<UserId, Cohort> cohorts;
  for (const auto& row : ReadCohorts(cohorts_path)) cohorts[row.user_id] = row.cohort;
  const auto arms = Enrollment(std::move(cohorts)).AssignAll(c.arm_seed);
  WriteArms(arms, out);
  std::map<Arm, int> sizes;
  for (const auto& [user, arm] : arms) ++sizes[arm];
  for (const auto& [arm, n] : sizes) std::cout << ArmLabel(arm) << ' ' << n << '\n';
  return 0;
}

int RunServe(const RunConfig& c, const std::string& arms_path, const std::string& events_path) {
  const Corpus corpus = LoadCorpus(c);
  std::shared_ptr<const Recommender> model =
      LoadRecommender(RecommenderPath(c.model_dir, ParseAlgorithm(c.algo)));
  auto engine = MakeEngine(model, LoadClusterModel(ClusterModelPath(c.model_dir)),
                           LatestRatings(corpus.ratings()));
  EventLog log(events_path);
  ServiceConfig sc;
  sc.pool_size = c.pool_size;
  sc.session_timeout_minutes = c.session_timeout;
  sc.token_seed = RecommenderService::SystemClock();
  RecommenderService service(engine, ReadArms(arms_path), &log, sc);
  HttpServer server(service);
  std::cout << "listening on " << c.host << ':' << c.port << '\n' << std::flush;
  if (!server.Listen(c.host, c.port)) throw UsageError("cannot listen on port " + std::to_string(c.port));
  return 0;
}

struct SimulateFlags {
  std::string out;
  int users_per_arm = 300;
  int catalog = 500;
  std::vector<std::string> shifts;
  bool survey = true;
};

// "D-BRC_DS:during:login:1.2"
RateShift ParseShift(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 4) throw UsageError("shift must look like ARM:WINDOW:RATE:MULTIPLIER");
  const auto dash = parts[0].find('-');
  if (dash == std::string::npos) throw UsageError("arm must look like D-BRC or ND-Control");
  RateShift s;
  s.arm = {ParseCohort(parts[0].substr(0, dash)), ParseTreatment(parts[0].substr(dash + 1))};
  s.window = parts[1];
  s.rate = parts[2];
  try {
    s.multiplier = std::stod(parts[3]);
  } catch (const std::exception&) {
    throw UsageError("bad multiplier in shift '" + text + "'");
  }
  return s;
}

int RunSimulate(const RunConfig& c, const SimulateFlags& f) {
  const std::uint64_t seed = RequireSeed(c, "simulate");
  SimulationConfig sim;
  sim.seed = seed;
  sim.users_per_arm = f.users_per_arm;
  sim.catalog_size = f.catalog;
  sim.genome_dim = c.genome_dim;
  sim.timeout_minutes = c.session_timeout;
  for (const auto& s : f.shifts) sim.shifts.push_back(ParseShift(s));
  const SimulationResult result = Simulate(sim);

  const fs::path dir = f.out;
  Corpus(result.movies, {}, result.genome).WriteDirectory(dir);
  WriteEventLog(result.events, dir / "events.jsonl");
  WriteArms(result.arms, dir / "arms.csv");
  Manifest m{.stage = "simulate", .seed = seed};
  m.params["users_per_arm"] = std::to_string(f.users_per_arm);
  m.params["catalog"] = std::to_string(f.catalog);
  for (std::size_t i = 0; i < f.shifts.size(); ++i) m.params["shift" + std::to_string(i)] = f.shifts[i];
  for (const char* name : {"movies.csv", "genome-scores.csv", "genome-tags.csv", "events.jsonl",
                           "arms.csv"}) {
    m.AddOutput(dir / name);
  }
  if (f.survey) {
    WriteSurvey(SimulateSurvey(result.arms, {.seed = seed}), dir / "survey.csv");
    m.AddOutput(dir / "survey.csv");
  }
  {
    std::ofstream truth(dir / "truth.csv");
    truth << "window,user_id";
    for (auto name : kMetricNames) truth << ',' << name;
    truth << '\n';
    for (const auto& [window, records] : result.truth) {
      for (const auto& [user, r] : records) {
        truth << window << ',' << user;
        for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
          const double v = MetricValue(r, i);
          truth << ',';
          if (!std::isnan(v)) truth << nlohmann::json(v).dump();
        }
        truth << '\n';
      }
    }
  }
  m.AddOutput(dir / "truth.csv");
  m.params["windows"] = "pre,during,post";
  WriteManifest(m, dir);
  std::cout << "simulated " << result.arms.size() << " users, " << result.events.size()
            << " events into " << dir.string() << '\n';
  return 0;
}

struct AnalyzeFlags {
  std::string events;
  std::string arms;
  std::optional<std::string> survey;
  std::optional<std::string> pre, during, post;
  std::string out;
  bool include_control = false;
};

int RunAnalyze(const RunConfig& c, const AnalyzeFlags& f) {
  const auto events = ReadEventLog(f.events);
  const auto arms = ReadArms(f.arms);
  const auto genome = LoadGenome(c.data_dir / "genome-scores.csv", c.data_dir / "genome-tags.csv",
                                 c.genome_dim);
  std::vector<UserId> users;
  for (const auto& [user, arm] : arms) users.push_back(user);
  std::vector<WindowMetrics> windows;
  for (const auto& [name, range] : {std::pair{"pre", f.pre}, std::pair{"during", f.during},
                                    std::pair{"post", f.post}}) {
    if (!range) continue;
    const Window w = ParseDateRange(*range);
    windows.push_back({name, w, ComputeAllMetrics(users, events, w, genome.genome, c.session_timeout)});
  }
  if (windows.empty()) throw UsageError("analyze: give at least one of --pre, --during, --post");
  AnalysisReport report = AnalyzeExperiment(arms, windows);
  Manifest m{.stage = "analyze"};
  m.AddInput(f.events);
  m.AddInput(f.arms);
  if (f.survey) {
    m.AddInput(*f.survey);
    try {
      report.olr = FitSurveyOlr(ReadSurvey(*f.survey), arms, {f.include_control});
    } catch (const stats::StatsError& e) {
      report.olr_error = e.what();
    }
  }
  WriteReport(report, f.out);
  for (const char* name : {"means.csv", "anova.csv", "pairwise.csv", "olr.csv", "summary.txt"}) {
    if (fs::exists(fs::path(f.out) / name)) m.AddOutput(fs::path(f.out) / name);
  }
  for (const auto& w : windows) m.params["window." + w.name] = FormatDate(w.window.start) + ".." + FormatDate(w.window.end - 86400);
  WriteManifest(m, f.out);
  std::cout << FormatReportSummary(report);
  return 0;
}

int RunPipeline(const RunConfig& c, const std::string& out) {
  auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      throw UsageError(std::string("stage ") + name + ": " + e.what());
    }
  };
  const std::uint64_t seed = RequireSeed(c, "pipeline");
  stage("ingest", [&] { return RunIngest(c); });
  stage("train", [&] { return RunTrain(c, {}); });
  stage("cluster", [&] { return RunCluster(c, 300, std::nullopt); });
  RunConfig sim_config = c;
  sim_config.seed = seed;
  SimulateFlags sf;
  sf.out = (fs::path(out) / "simulation").string();
  stage("simulate", [&] { return RunSimulate(sim_config, sf); });
  AnalyzeFlags af;
  af.events = sf.out + "/events.jsonl";
  af.arms = sf.out + "/arms.csv";
  af.survey = sf.out + "/survey.csv";
  const auto windows = SimulationConfig::DefaultWindows();
  auto range = [](const Window& w) { return FormatDate(w.start) + ".." + FormatDate(w.end - 86400); };
  af.pre = range(windows[0].window);
  af.during = range(windows[1].window);
  af.post = range(windows[2].window);
  af.out = (fs::path(out) / "report").string();
  RunConfig analyze_config = c;
  analyze_config.data_dir = sf.out;
  return stage("analyze", [&] { return RunAnalyze(analyze_config, af); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"divrec: diversity-controllable movie recommender and experiment toolkit"};
  app.require_subcommand(1);

  CommonFlags common;
  TrainFlags train_flags;
  SimulateFlags sim_flags;
  AnalyzeFlags analyze_flags;
  std::optional<std::string> algo;
  std::optional<int> k;
  std::optional<std::size_t> pool_size;
  std::optional<int> port;
  std::optional<std::string> host;
  std::optional<std::uint64_t> arm_seed;
  std::optional<int> timeout;
  int max_iters = 300;
  std::optional<std::string> report_path;
  UserId user = 0;
  int level = DiversityLevel::kSessionDefault;
  std::optional<std::string> since;
  std::string out;
  std::string cohorts_in;
  std::string arms_in;
  std::string events_out = "events.jsonl";
  bool activity_filter = false;

  auto algo_opt = [&](CLI::App* cmd) {
    cmd->add_option("--algo", algo, "base recommender: peasant, warrior or wizard")
        ->check(CLI::IsMember({"peasant", "warrior", "wizard"}));
  };
  auto seed_opt = [&](CLI::App* cmd) {
    cmd->add_option("--seed", common.seed, "random seed (required)");
  };

  auto* ingest = app.add_subcommand("ingest", "validate the corpus and write a summary");
  AddCommon(ingest, common);

  auto* train = app.add_subcommand("train", "train a base recommender");
  AddCommon(train, common);
  algo_opt(train);
  seed_opt(train);
  train->add_option("--features", train_flags.features, "FunkSVD features")->capture_default_str();
  train->add_option("--epochs", train_flags.epochs, "FunkSVD epochs per feature")->capture_default_str();
  train->add_option("--learning-rate", train_flags.learning_rate, "FunkSVD learning rate")->capture_default_str();
  train->add_option("--regularization", train_flags.regularization, "FunkSVD regularization")->capture_default_str();
  train->add_option("--neighbors", train_flags.neighbors, "item-item neighborhood size")->capture_default_str();

  auto* cluster = app.add_subcommand("cluster", "k-means over genome vectors");
  AddCommon(cluster, common);
  seed_opt(cluster);
  cluster->add_option("--k", k, "number of clusters (default 24)");
  cluster->add_option("--max-iters", max_iters, "Lloyd iteration cap")->capture_default_str();
  cluster->add_option("--report", report_path, "write the top 10 tags per cluster here");

  auto* rerank = app.add_subcommand("rerank", "print the three re-ranked pages for a user as JSON lines");
  AddCommon(rerank, common);
  algo_opt(rerank);
  rerank->add_option("--user", user, "user id")->required();
  rerank->add_option("--level", level, "diversity level 1..5")->check(CLI::Range(1, 5))->capture_default_str();
  rerank->add_option("--pool-size", pool_size, "candidate pool size (default 600)");

  auto* diversity = app.add_subcommand("diversity", "historical rating diversity of one user");
  AddCommon(diversity, common);
  diversity->add_option("--user", user, "user id")->required();
  diversity->add_option("--since", since, "only ratings from this date on (YYYY-MM-DD)");

  auto* cohorts = app.add_subcommand("cohorts", "median split of users into D and ND");
  AddCommon(cohorts, common);
  cohorts->add_option("--out", out, "output CSV (user_id,score,cohort)")->required();
  cohorts->add_option("--since", since, "only ratings from this date on (YYYY-MM-DD)");
  cohorts->add_flag("--activity-filter", activity_filter,
                    "drop users with fewer than 20 ratings before splitting");

  auto* assign = app.add_subcommand("assign", "assign treatments to cohort members");
  AddCommon(assign, common);
  assign->add_option("--cohorts", cohorts_in, "cohorts CSV")->required();
  assign->add_option("--arm-seed", arm_seed, "assignment seed (default 0)");
  assign->add_option("--out", out, "output CSV (user_id,cohort,treatment)")->required();

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  AddCommon(serve, common);
  algo_opt(serve);
  serve->add_option("--arms", arms_in, "arms CSV")->required();
  serve->add_option("--events", events_out, "event log (JSON lines, appended)")->capture_default_str();
  serve->add_option("--host", host, "bind address (default 127.0.0.1)");
  serve->add_option("--port", port, "port (default 8080)");
  serve->add_option("--pool-size", pool_size, "candidate pool size (default 600)");
  serve->add_option("--session-timeout", timeout, "session inactivity timeout, minutes (default 30)");

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic experiment log");
  AddCommon(simulate, common);
  seed_opt(simulate);
  simulate->add_option("--out", sim_flags.out, "output directory")->required();
  simulate->add_option("--users-per-arm", sim_flags.users_per_arm, "users in each of the six arms")->capture_default_str();
  simulate->add_option("--catalog", sim_flags.catalog, "number of movies")->capture_default_str();
  simulate->add_option("--shift", sim_flags.shifts,
                       "planted effect ARM:WINDOW:RATE:MULTIPLIER, e.g. ND-BRC_DS:during:login:1.2");
  simulate->add_option("--session-timeout", timeout, "session timeout, minutes (default 30)");

  auto* analyze = app.add_subcommand("analyze", "ANOVA, Welch tests and survey OLR over an event log");
  AddCommon(analyze, common);
  analyze->add_option("--events", analyze_flags.events, "event log (JSON lines)")->required();
  analyze->add_option("--arms", analyze_flags.arms, "arms CSV")->required();
  analyze->add_option("--survey", analyze_flags.survey, "survey CSV");
  analyze->add_option("--pre", analyze_flags.pre, "pre-experiment window YYYY-MM-DD..YYYY-MM-DD");
  analyze->add_option("--during", analyze_flags.during, "experiment window");
  analyze->add_option("--post", analyze_flags.post, "post-experiment window");
  analyze->add_option("--out", analyze_flags.out, "report directory")->required();
  analyze->add_flag("--include-control", analyze_flags.include_control,
                    "include Control users in the survey regression");
  analyze->add_option("--session-timeout", timeout, "session timeout, minutes (default 30)");

  auto* pipeline = app.add_subcommand("pipeline", "ingest, train, cluster, simulate and analyze");
  AddCommon(pipeline, common);
  algo_opt(pipeline);
  seed_opt(pipeline);
  pipeline->add_option("--out", out, "output directory for simulation and report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig c = Resolve(common);
    if (algo) c.algo = *algo;
    if (k) c.k = *k;
    if (pool_size) c.pool_size = *pool_size;
    if (port) c.port = *port;
    if (host) c.host = *host;
    if (arm_seed) c.arm_seed = *arm_seed;
    if (timeout) c.session_timeout = *timeout;

    if (ingest->parsed()) return RunIngest(c);
    if (train->parsed()) return RunTrain(c, train_flags);
    if (cluster->parsed()) return RunCluster(c, max_iters, report_path);
    if (rerank->parsed()) return RunRerank(c, user, level);
    if (diversity->parsed()) return RunDiversity(c, user, since);
    if (cohorts->parsed()) return RunCohorts(c, out, since, activity_filter);
    if (assign->parsed()) return RunAssign(c, cohorts_in, out);
    if (serve->parsed()) return RunServe(c, arms_in, events_out);
    if (simulate->parsed()) return RunSimulate(c, sim_flags);
    if (analyze->parsed()) return RunAnalyze(c, analyze_flags);
    if (pipeline->parsed()) return RunPipeline(c, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
