#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "fpkit/experiment.hpp"

using namespace fpkit::experiment;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fpkit_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// Column `col` of every data row.
std::vector<std::string> csv_column(const fs::path& p, int col) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> out;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string cell;
    for (int i = 0; i <= col; ++i) std::getline(row, cell, ',');
    out.push_back(cell);
  }
  return out;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(FPKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_text(const std::string& name, const std::string& text, std::string* log_out = nullptr) {
  const fs::path dir = scratch_dir(name);
  write_file(dir / "config.json", text);
  std::ostringstream log;
  const int rc = run_experiment(dir / "config.json", dir / "out", log);
  if (log_out) *log_out = log.str();
  return rc;
}

}  // namespace

TEST_CASE("every shipped config round-trips through JSON") {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(FPKIT_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const ExperimentConfig c = load_config(entry.path());
    const ExperimentConfig again = parse_config(to_json(c));
    CHECK(again == c);
    CHECK(to_json(again) == to_json(c));
    ++seen;
  }
  CHECK(seen == 6);
}

TEST_CASE("config diagnostics name the field") {
  SUBCASE("missing mu") {
    std::string log;
    CHECK(run_text("missing_mu", R"({"experiment": "aoi", "scenario": {"K": 2}})", &log) == kConfigError);
    CHECK(log.find("mu") != std::string::npos);
  }
  SUBCASE("unknown key") {
    try {
      parse_config_text(R"({"experiment": "aoi", "scenario": {"K": 2, "mu": 1, "nu": 3}})");
      FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "scenario.nu");
    }
  }
  SUBCASE("bad types and ranges") {
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"experiment": "aoi", "scenario": {"K": 0, "mu": 1}})"),
                         doctest::Contains("scenario.K"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"experiment": "chess"})"),
                         doctest::Contains("experiment"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text(R"({"experiment": "aoi", "solver": {"armijo_c": 2}, "scenario": {"K": 2, "mu": 1}})"),
        doctest::Contains("solver"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
  }
  SUBCASE("oracle limits") {
    // Checked when the experiment runs, since a sweep may change K.
    std::string log;
    CHECK(run_text("oracle_k5", R"({"experiment": "aoi", "oracle": true, "scenario": {"K": 5, "mu": 1}})",
                   &log) == kConfigError);
    CHECK(log.find("oracle") != std::string::npos);
  }
}

TEST_CASE("unit conversion at the config boundary") {
  const ExperimentConfig c = load_config(fs::path(FPKIT_CONFIG_DIR) / "secure_two_link.json");
  const auto sc = to_secure_scenario(c.secure);
  CHECK(sc.P == doctest::Approx(10.0));
  CHECK(sc.sigma2[1] == doctest::Approx(0.1));
  const ExperimentConfig r = load_config(fs::path(FPKIT_CONFIG_DIR) / "radar_reference.json");
  const auto rs = to_radar_scenario(r.radar);
  CHECK(rs.power[0] == doctest::Approx(1000.0));
  CHECK(rs.theta[0] == doctest::Approx(3.14159265358979 / 6));
}

TEST_CASE("seed precedence") {
  ExperimentConfig c = parse_config_text(R"({"experiment": "aoi", "scenario": {"K": 2, "mu": 1}})");
  ::unsetenv(kSeedEnv);
  CHECK(effective_seed(c) == 0);
  ::setenv(kSeedEnv, "42", 1);
  CHECK(effective_seed(c) == 42);
  c.seed = 7;
  CHECK(effective_seed(c) == 7);
  ::unsetenv(kSeedEnv);
}

TEST_CASE("run writes the output bundle and is deterministic") {
  const fs::path cfg = fs::path(FPKIT_CONFIG_DIR) / "aoi_k3.json";
  const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  std::ostringstream log;
  REQUIRE(run_experiment(cfg, a, log) == kOk);
  REQUIRE(run_experiment(cfg, b, log) == kOk);
  for (const char* f : {"trace.csv", "summary.json", "baselines.csv"}) CHECK(fs::exists(a / f));
  CHECK(read_file(a / "trace.csv").rfind("iter,objective,wall_ms,inner_iters\n", 0) == 0);
  CHECK(csv_column(a / "trace.csv", 1) == csv_column(b / "trace.csv", 1));
  CHECK(csv_column(a / "trace.csv", 3) == csv_column(b / "trace.csv", 3));

  const auto summary = nlohmann::json::parse(read_file(a / "summary.json"));
  const double value = summary.at("final_sum_aoi").get<double>();
  const double oracle = summary.at("oracle").get<double>();
  CHECK(std::abs(value - oracle) <= 1e-3 * oracle);
}

TEST_CASE("sweep writes one row per point") {
  const fs::path out = scratch_dir("sweep_aoi");
  std::ostringstream log;
  REQUIRE(run_sweep(fs::path(FPKIT_CONFIG_DIR) / "aoi_sweep.json", out, log) == kOk);
  CHECK(csv_column(out / "sweep.csv", 0).size() == 8);
}

TEST_CASE("cli exit codes") {
  CHECK(cli("verify --suite core") == 0);
  CHECK(cli("verify --suite nonsense") == 2);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("run --config /nonexistent/config.json --out /tmp/fpkit_never") == 4);

  const fs::path dir = scratch_dir("cli");
  write_file(dir / "bad.json", R"({"experiment": "aoi", "scenario": {"K": 2}})");
  CHECK(cli("run --config " + (dir / "bad.json").string() + " --out " + (dir / "o").string()) == 2);
  CHECK(cli("sweep --config " + (dir / "bad.json").string() + " --out " + (dir / "o").string()) == 2);
  CHECK(cli("run --config " + std::string(FPKIT_CONFIG_DIR) + "/aoi_k3.json --out " +
            (dir / "ok").string()) == 0);
}
