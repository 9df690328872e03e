#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include <json.hpp>

#include "dwlab/errors.hpp"
#include "dwlab/io.hpp"
#include "dwlab/runner.hpp"

using namespace dwlab;
using nlohmann::json;

namespace {

std::string temp_dir(const char* tag) {
  auto p = std::filesystem::temp_directory_path() /
           (std::string("dwlab_test_") + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace

TEST_CASE("config round trip is stable") {
  json j;
  j["lambda"] = "5/11";
  j["rho_plus"] = 1.04;
  j["hierarchy"] = {{"k", 1}, {"method", "both"}};
  j["sim"] = {{"frame", "fixed"}, {"t_end", 100.0},
              {"perturbation", {{"kind", "tail_dx"}, {"amplitude_rho", 1e-4}}}};
  const ExperimentConfig a = ExperimentConfig::from_json(j);
  const ExperimentConfig b = ExperimentConfig::from_json(a.to_json());
  CHECK(a.to_json() == b.to_json());
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.params.lambda_rational.has_value());
  CHECK(a.log_flag());  // k(5/11) = 2 is an integer
}

TEST_CASE("unknown keys are rejected with their path") {
  json j;
  j["lambda"] = 0.5;
  j["typo_key"] = 1;
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j),
                       doctest::Contains("typo_key"), ConfigError);

  json j2;
  j2["sim"] = json::object();
  j2["sim"]["cells"] = 128;
  j2["sim"]["cells"] = 128;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j2), ConfigError);
}

TEST_CASE("invalid physics parameters map to config errors") {
  json j;
  j["lambda"] = 1.2;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
}

TEST_CASE("csv files are byte-identical across writes") {
  const std::string dir = temp_dir("csv");
  const std::vector<io::Column> cols = {
      {"a", {1.0, 2.0, 1.0 / 3.0}}, {"b", {-0.5, 1e-17, 123456.789}}};
  io::write_csv(dir + "/x1.csv", cols);
  io::write_csv(dir + "/x2.csv", cols);
  CHECK(io::hash_file(dir + "/x1.csv") == io::hash_file(dir + "/x2.csv"));

  const auto back = io::read_csv(dir + "/x1.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].name == "a");
  CHECK(back[1].values[2] == 123456.789);
  CHECK(back[0].values[2] == 1.0 / 3.0);
}

TEST_CASE("profile stage emits the documented artifacts") {
  const std::string dir = temp_dir("profile");
  ExperimentConfig cfg;
  cfg.params = Params(0.5, 1.0, 1.05);
  cfg.sim.params = cfg.params;
  cfg.xi_intervals = 512;
  cfg.output_dir = dir;
  run_pipeline(cfg, Stage::Profile);
  CHECK(io::file_exists(dir + "/profile.csv"));
  CHECK(io::file_exists(dir + "/gauss_bounds.json"));
  const auto cols = io::read_csv(dir + "/profile.csv");
  REQUIRE(cols.size() == 5);
  CHECK(cols[0].name == "xi");
  CHECK(cols[1].name == "rho_bar");
  CHECK(cols[2].name == "drho");
  CHECK(cols[3].name == "d2rho");
  CHECK(cols[4].name == "M_bar");
}

TEST_CASE("expand stage reports masses and the scan") {
  const std::string dir = temp_dir("expand");
  ExperimentConfig cfg;
  cfg.params = Params(0.5, 1.0, 1.05);
  cfg.sim.params = cfg.params;
  cfg.xi_intervals = 1024;
  cfg.scan_points = 12;
  cfg.output_dir = dir;
  const PipelineResult res = run_pipeline(cfg, Stage::Expand);
  CHECK(res.scan->pass_linf);
  CHECK(io::file_exists(dir + "/correction_1.csv"));
  CHECK(io::file_exists(dir + "/correction_2.csv"));
  CHECK(io::file_exists(dir + "/corrections.json"));
  CHECK(io::file_exists(dir + "/residual_scan.csv"));
  CHECK(io::file_exists(dir + "/residual_scan.svg"));
  const auto side = json::parse(io::read_text(dir + "/corrections.json"));
  CHECK(side["levels"].size() == 2);
}

TEST_CASE("simulation snapshots are reused when fingerprints match") {
  const std::string dir = temp_dir("resume");
  ExperimentConfig cfg;
  cfg.params = Params(0.5, 1.0, 1.05);
  cfg.sim.params = cfg.params;
  cfg.xi_intervals = 512;
  cfg.sim.cells = 256;
  cfg.sim.t_end = 50.0;
  cfg.sim.snapshots = 4;
  cfg.scan_points = 12;
  cfg.fit_t_min = 5.0;
  cfg.output_dir = dir;

  const PipelineResult first = run_pipeline(cfg, Stage::Simulate);
  CHECK_FALSE(first.sim_reused);
  const std::string h1 = io::hash_file(dir + "/snapshot_002.csv");

  const PipelineResult second = run_pipeline(cfg, Stage::Simulate);
  CHECK(second.sim_reused);
  CHECK(io::hash_file(dir + "/snapshot_002.csv") == h1);
  REQUIRE(first.sim->snapshots.size() == second.sim->snapshots.size());
  CHECK(first.sim->snapshots.back().t ==
        doctest::Approx(second.sim->snapshots.back().t));

  // a config change invalidates the fingerprint
  ExperimentConfig cfg2 = cfg;
  cfg2.sim.cells = 320;
  const PipelineResult third = run_pipeline(cfg2, Stage::Simulate);
  CHECK_FALSE(third.sim_reused);
}

TEST_CASE("identical configs give byte-identical artifacts") {
  ExperimentConfig cfg;
  cfg.params = Params(0.5, 1.0, 1.05);
  cfg.sim.params = cfg.params;
  cfg.xi_intervals = 512;
  cfg.sim.cells = 256;
  cfg.sim.t_end = 50.0;
  cfg.sim.snapshots = 4;
  cfg.scan_points = 12;
  cfg.fit_t_min = 5.0;

  const std::string d1 = temp_dir("det1");
  const std::string d2 = temp_dir("det2");
  cfg.output_dir = d1;
  run_pipeline(cfg, Stage::Simulate);
  cfg.output_dir = d2;
  run_pipeline(cfg, Stage::Simulate);
  for (const char* f :
       {"/profile.csv", "/correction_1.csv", "/snapshot_001.csv",
        "/residual_scan.csv"}) {
    CHECK(io::hash_file(d1 + f) == io::hash_file(d2 + f));
  }
}

TEST_CASE("missing output-directory parent is a config error") {
  CHECK_THROWS_AS(io::ensure_dir("/nonexistent_parent_xyz/child"),
                  ConfigError);
}

TEST_CASE("error payload carries stage, code and message") {
  try {
    throw HierarchyError("collocation", "boom", "level 3");
  } catch (const Error& e) {
    CHECK(static_cast<int>(e.code()) == 3);
    CHECK(e.stage() == "collocation");
    CHECK(std::string(e.what()) == "boom");
    CHECK(e.context() == "level 3");
  }
}

TEST_CASE("cli binary smoke checks") {
  // exercised only when the driver sits next to the test binary
  if (!io::file_exists("./dwlab")) return;
  const std::string dir = temp_dir("cli");

  CHECK(std::system(("./dwlab profile --lambda 0.5 --dry-run --out " + dir +
                     " > /dev/null").c_str()) == 0);
  const int bad = std::system(
      ("./dwlab profile --lambda 1.2 --out " + dir + " 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(bad) == 2);

  io::write_text(dir + "/bad.json", "{\"nope\": 1}");
  const int unknown = std::system(("./dwlab profile --config " + dir +
                                   "/bad.json 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(unknown) == 2);
}
