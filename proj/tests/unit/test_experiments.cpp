/*
 * Copyright 2026 The bayesinv Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include <gtest/gtest.h>

#include "experiments.hpp"

namespace {

namespace fs = std::filesystem;
using namespace bayesinv;
using namespace bayesinv::cli;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bayesinv_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

ExperimentConfig config(const std::string& command, Params flags = {}, std::uint64_t seed = 1) {
  return merge_config(command, seed, "unused", {}, flags);
}

json summary(const Artifacts& a, const std::string& name = "summary.json") { return json::parse(a.get(name)); }

TEST(Config, DefaultsFileAndFlagsLayer) {
  const ExperimentConfig cfg = merge_config("gp", 4, "o", {{"n", "30"}, {"sigma", "0.2"}}, {{"n", "40"}});
  EXPECT_EQ(cfg.params.at("n"), "40");
  EXPECT_EQ(cfg.params.at("sigma"), "0.2");
  EXPECT_EQ(cfg.params.at("kernel"), "ou");
  EXPECT_EQ(cfg.seed, 4u);
  EXPECT_THROW(merge_config("gp", 1, "o", {}, {{"bogus", "1"}}), UsageError);
  EXPECT_THROW(find_command("nope"), UsageError);
}

TEST(Config, LoadsFlatJsonFile) {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  const fs::path file = dir / "cfg.json";
  std::ofstream(file) << R"({"seed": 12, "n": 25, "kernel": "se", "n_values": [100, 1000], "write_operator": true})";
  const FileConfig fc = load_config_file(file.string());
  ASSERT_TRUE(fc.seed.has_value());
  EXPECT_EQ(*fc.seed, 12u);
  EXPECT_EQ(fc.params.at("n"), "25");
  EXPECT_EQ(fc.params.at("kernel"), "se");
  EXPECT_EQ(fc.params.at("n_values"), "100,1000");
  EXPECT_EQ(fc.params.at("write_operator"), "true");
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_THROW(load_config_file((dir / "bad.json").string()), IoError);
  EXPECT_THROW(load_config_file((dir / "missing.json").string()), IoError);
  fs::remove_all(dir);
}

TEST(Run, SameSeedGivesIdenticalBytes) {
  const std::vector<ExperimentConfig> cfgs{
      config("demo-linear", {{"n", "40"}}), config("gp", {{"kernel", "spline"}}),
      config("calibrate"), config("inconsistency", {{"n_values", "100,1000"}, {"points", "50"}}),
      config("coverage", {{"replications", "300"}}), config("risk", {{"replications", "300"}})};
  for (const auto& cfg : cfgs) {
    const Artifacts a = run(cfg);
    const Artifacts b = run(cfg);
    ASSERT_EQ(a.files.size(), b.files.size()) << cfg.command;
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      EXPECT_EQ(a.files[i].first, b.files[i].first);
      EXPECT_EQ(a.files[i].second, b.files[i].second) << cfg.command << " " << a.files[i].first;
    }
    EXPECT_NO_THROW(a.get("manifest.json"));
  }
  ExperimentConfig other = cfgs[1];
  other.seed = 2;
  EXPECT_NE(run(other).get("training.csv"), run(cfgs[1]).get("training.csv"));
}

TEST(Run, MonteCarloOutputIgnoresWorkerCount) {
  const Artifacts a = run(config("coverage", {{"replications", "200"}, {"workers", "1"}}));
  const Artifacts b = run(config("coverage", {{"replications", "200"}, {"workers", "3"}}));
  EXPECT_EQ(a.get("replications.csv"), b.get("replications.csv"));
}

TEST(Execute, InvalidPriorWritesNothing) {
  const fs::path dir = scratch("invalid_prior");
  ExperimentConfig cfg = config("demo-linear", {{"prior", "no-such-prior"}});
  cfg.output_dir = dir.string();
  std::ostringstream log, err;
  EXPECT_EQ(execute(cfg, log, err), 2);
  EXPECT_FALSE(fs::exists(dir));
  EXPECT_NE(err.str().find("smooth-zero"), std::string::npos);
}

TEST(Execute, MissingDataFileIsIoError) {
  const fs::path dir = scratch("missing_data");
  ExperimentConfig cfg = config("gp", {{"data", "/nonexistent/bayesinv/data.csv"}});
  cfg.output_dir = dir.string();
  std::ostringstream log, err;
  EXPECT_EQ(execute(cfg, log, err), 3);
  EXPECT_NE(err.str().find("cannot open data file"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Execute, WritesArtifactsToDisk) {
  const fs::path dir = scratch("write");
  ExperimentConfig cfg = config("gp");
  cfg.output_dir = dir.string();
  std::ostringstream log, err;
  ASSERT_EQ(execute(cfg, log, err), 0) << err.str();
  for (const char* f : {"training.csv", "predictions.csv", "summary.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const io::Table t = io::read_csv((dir / "predictions.csv").string());
  EXPECT_EQ(t.header, (std::vector<std::string>{"x", "mean", "sd"}));
  EXPECT_EQ(t.rows.size(), 101u);
  fs::remove_all(dir);
}

TEST(DemoLinear, MapBeatsNoise) {
  const json s = summary(run(config("demo-linear")));
  EXPECT_EQ(s["kernel"], "deblur");
  EXPECT_EQ(s["prior"], "smooth-zero");
  EXPECT_LT(s["rmse_map"].get<double>(), s["noise_rmse"].get<double>());
  EXPECT_LT(s["rmse_map"].get<double>(), s["rmse_data"].get<double>());
  EXPECT_LE(s["objective_at_map"].get<double>(), s["objective_at_truth"].get<double>());
}

TEST(DemoLinear, EveryOperatorAndPriorRuns) {
  for (const char* k : {"deblur", "seismic", "gravity", "diffraction", "groundwater"})
    for (const char* p : {"smooth-interior", "smooth-zero", "smooth-soft", "nonsmooth", "jump"}) {
      const Artifacts a = run(config("demo-linear", {{"kernel", k}, {"prior", p}, {"n", "30"}, {"truth", "piecewise"}}));
      const json s = summary(a);
      EXPECT_TRUE(s["rmse_map"].is_number()) << k << " " << p;
    }
  const Artifacts a = run(config("demo-linear", {{"n", "10"}, {"write_operator", "true"}}));
  std::istringstream op(a.get("operator.csv"));
  EXPECT_EQ(io::parse_csv(op).rows.size(), 10u);
}

TEST(Gp, RepresenterAndSplineConsistency) {
  for (const char* k : {"ou", "se", "spline", "brownian"}) {
    const json s = summary(run(config("gp", {{"kernel", k}})));
    EXPECT_LT(s["representer_residual"].get<double>(), 1e-12) << k;
    EXPECT_LT(s["solve_residual"].get<double>(), 1e-10) << k;
  }
  const json s = summary(run(config("gp", {{"kernel", "spline"}, {"sigma2_theta", "3"}})));
  EXPECT_LT(s["spline_consistency"].get<double>(), 1e-8);
}

TEST(Calibrate, LinearDemoAgreesAndWholeLineFlagged) {
  const json lin = json::parse(run(config("calibrate", {{"source", "linear-demo"}})).get("estimates.json"));
  EXPECT_EQ(lin["estimates"]["x_classical"], lin["estimates"]["x_inverse"]);
  EXPECT_DOUBLE_EQ(lin["estimates"]["x_classical"].get<double>(), 1.0);

  const json weak = json::parse(run(config("calibrate", {{"beta", "0"}, {"n", "30"}})).get("estimates.json"));
  EXPECT_EQ(weak["confidence_set"]["kind"], "whole_line");
  EXPECT_EQ(weak["confidence_set"]["uninformative"], true);

  const json ok = json::parse(run(config("calibrate")).get("estimates.json"));
  EXPECT_EQ(ok["posterior"]["status"], "ok");
  EXPECT_NEAR(ok["posterior"]["mean"].get<double>(), ok["estimates"]["x_inverse"].get<double>(), 1e-6);
  EXPECT_NEAR(ok["posterior"]["integral"].get<double>(), 1.0, 1e-6);
}

TEST(Calibrate, FlatPriorFailsWithActionableMessage) {
  ExperimentConfig cfg = config("calibrate", {{"prior", "flat"}});
  cfg.output_dir = scratch("flat").string();
  std::ostringstream log, err;
  EXPECT_EQ(execute(cfg, log, err), 1);
  EXPECT_NE(err.str().find("proper prior"), std::string::npos);
}

TEST(Calibrate, ReadsDataFile) {
  const fs::path dir = scratch("calib_file");
  fs::create_directories(dir);
  std::ofstream(dir / "d.csv") << "x,y\n0,0.1\n1,1.2\n2,1.9\n3,3.2\n4,3.9\n";
  const json s = json::parse(run(config("calibrate", {{"source", "file"}, {"data", (dir / "d.csv").string()},
                                                      {"y_new", "2.5,2.7"}}))
                                 .get("estimates.json"));
  EXPECT_EQ(s["m"], 2);
  EXPECT_TRUE(s["confidence_set"].is_null());
  EXPECT_NEAR(s["x_offset"].get<double>(), 2.0, 1e-14);
  EXPECT_THROW(run(config("calibrate", {{"source", "file"}, {"data", (dir / "d.csv").string()}})), UsageError);
  fs::remove_all(dir);
}

TEST(Inconsistency, RatioDensitiesAndRuntime) {
  const auto t0 = std::chrono::steady_clock::now();
  const Artifacts a = run(config("inconsistency"));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 60.0);
  const json s = summary(a);
  EXPECT_GE(s["sd_ratio_last_over_first"].get<double>(), 0.5);
  EXPECT_LT(s["max_relative_sd_gap_quadrature_vs_closed"].get<double>(), 1e-8);
  std::istringstream in(a.get("density_n100000.csv"));
  const io::Table d = io::parse_csv(in);
  const auto x = d.values("x");
  for (std::size_t i = 1; i < x.size(); ++i) EXPECT_GT(x[i], x[i - 1]);
  std::istringstream tin(a.get("table.csv"));
  EXPECT_EQ(io::parse_csv(tin).rows.size(), 4u);
}

TEST(MonteCarlo, SummariesHaveExpectedKeys) {
  const json c = summary(run(config("coverage", {{"replications", "500"}})));
  EXPECT_NEAR(c["coverage"].get<double>(), 0.95, 0.04);
  const json r = summary(run(config("risk", {{"replications", "500"}})));
  EXPECT_GT(r["max_over_median_classical"].get<double>(), 1.0);
  EXPECT_THROW(run(config("coverage", {{"replications", "zero"}})), UsageError);
}

}  // namespace
