#include "rcsp/config.hpp"

#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"
#include "rcsp/errors.hpp"

namespace rcsp {
namespace {

const std::filesystem::path kSourceDir = RCSP_SOURCE_DIR;

TEST(Config, RoundTrip) {
  SuiteConfig cfg;
  cfg.environments = {"open-space"};
  cfg.seeds = {3, 9};
  cfg.workers = 2;
  cfg.controller.planner.alpha = 0.25;
  cfg.controller.planner.objective = Objective::kWorst;
  cfg.controller.filter.c_hard = 0.2;
  cfg.controller.belief.tau = 3.5;
  cfg.controller.belief.family.pop_back();
  cfg.world.obs_sigma = 0.07;
  cfg.world.command_delay = 1;
  const Json j = to_json(cfg);
  const SuiteConfig back = suite_config_from_json(j);
  EXPECT_EQ(to_json(back), j);
  EXPECT_EQ(back.controller.planner.alpha, 0.25);
  EXPECT_EQ(back.controller.belief.family.size(), 5u);
  EXPECT_EQ(back.world.command_delay, 1);
}

TEST(Config, CheckedInDefaultsMatchCode) {
  SuiteConfig loaded = load_suite_config(kSourceDir / "configs/default.json");
  EXPECT_EQ(to_json(loaded), to_json(SuiteConfig{}));
}

TEST(Config, MissingKeysFallBack) {
  Json j = Json::parse(R"({"planner": {"alpha": 0.2}, "suite": {"seeds": [7]}})");
  SuiteConfig cfg = suite_config_from_json(j);
  EXPECT_EQ(cfg.controller.planner.alpha, 0.2);
  EXPECT_EQ(cfg.controller.planner.lambda, PlannerParams{}.lambda);
  EXPECT_EQ(cfg.seeds, std::vector<std::uint64_t>{7});
  EXPECT_EQ(cfg.environments, SuiteConfig{}.environments);
  SuiteConfig empty = suite_config_from_json(Json::object());
  EXPECT_EQ(to_json(empty), to_json(SuiteConfig{}));
}

TEST(Config, SchemaMismatch) {
  Json j = to_json(SuiteConfig{});
  j["schema_version"] = "rcsp-config/0";
  EXPECT_THROW(suite_config_from_json(j), VersionError);
}

TEST(Config, InvalidValues) {
  auto rejects = [](const char* text) {
    EXPECT_THROW(suite_config_from_json(Json::parse(text)), ConfigError)
        << text;
  };
  rejects(R"({"planner": {"alpha": 0.0}})");
  rejects(R"({"planner": {"alpha": 1.5}})");
  rejects(R"({"planner": {"lambda": -1}})");
  rejects(R"({"planner": {"objective": "median"}})");
  rejects(R"({"planner": {"top_k": 9}})");
  rejects(R"({"filter": {"kappa": 0}})");
  rejects(R"({"suite": {"environments": ["maze"]}})");
  rejects(R"({"suite": {"environments": []}})");
  rejects(R"({"suite": {"controllers": ["orca-style"]}})");
  rejects(R"({"suite": {"seeds": [1, 1]}})");
  rejects(R"({"suite": {"workers": 0}})");
  rejects(R"({"belief": {"conjectures": []}})");
  rejects(R"({"belief": {"conjectures": [{"kind": "wandering"}]}})");
  rejects(R"({"belief": {"conjectures": [{"kind": "static", "sigma": -1}]}})");
  rejects(R"({"planner": {"alpha": "high"}})");
}

TEST(Config, LoadErrors) {
  EXPECT_THROW(load_suite_config(kSourceDir / "configs/missing.json"),
               ConfigError);
  const auto path =
      std::filesystem::temp_directory_path() / "rcsp_config_test_bad.json";
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_suite_config(path), ConfigError);
  std::filesystem::remove(path);
}

TEST(Config, EnvironmentRoundTrip) {
  auto [env, s] = build_environment("bottleneck", 5);
  EnvironmentConfig back = environment_from_json(to_json(env));
  EXPECT_EQ(to_json(back), to_json(env));
  EXPECT_EQ(back.obstacles[0].rush_factor, env.obstacles[0].rush_factor);
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

}  // namespace
}  // namespace rcsp
