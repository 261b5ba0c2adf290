#pragma once

// JSON experiment configs and the run / sweep drivers behind the CLI.
//
// A config names one experiment and its scenario in user units: powers and
// noises in dBm, angles as multiples of pi, rates per unit time. Unknown keys
// are rejected and every diagnostic names the offending field.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpkit/aoi.hpp"
#include "fpkit/radar.hpp"
#include "fpkit/secure.hpp"
#include "fpkit/solver.hpp"

namespace fpkit::experiment {

enum ExitCode : int { kOk = 0, kConfigError = 2, kInvariantViolation = 3, kIoError = 4 };

inline constexpr const char* kSeedEnv = "FPKIT_SEED";

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error("config field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { Aoi, Radar, Secure, SecureTradeoff };

struct AoiConfig {
  int K = 0;
  double mu = 0.0;
  bool operator==(const AoiConfig&) const = default;
};

struct RadarConfig {
  int M = 0;
  int L = 0;
  std::vector<int> n_tx;
  std::vector<int> n_rx;
  std::vector<double> theta_pi;               // multiples of pi
  std::vector<std::vector<double>> beta;      // M x M real gains
  std::vector<double> sigma2_dbm;             // per radar
  std::vector<double> power_dbm;              // per radar
  bool operator==(const RadarConfig&) const = default;
};

struct SecureConfig {
  int L = 0;
  int K = 0;
  std::vector<std::vector<double>> h2;        // L x L linear gains
  std::vector<std::vector<double>> ht2;       // K x L linear gains
  std::vector<double> sigma2_dbm;             // L
  std::vector<double> sigma2_tilde_dbm;       // K
  double P_dbm = 0.0;
  std::vector<double> w;                      // secure only
  std::optional<double> eta;                  // secure-tradeoff run only
  int baseline_grid_points = 2001;
  bool operator==(const SecureConfig&) const = default;
};

struct SweepConfig {
  std::string axis;             // K | power_dbm | P_dbm | eta
  std::vector<double> values;
  bool operator==(const SweepConfig&) const = default;
};

struct ExperimentConfig {
  Kind kind = Kind::Aoi;
  std::optional<std::uint64_t> seed;
  SolveOptions solver;
  bool oracle = false;
  AoiConfig aoi;
  RadarConfig radar;
  SecureConfig secure;
  std::optional<SweepConfig> sweep;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

std::string kind_name(Kind kind);

/// Throws ConfigError naming the field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);
/// Throws IoError when the file cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Config seed if present, else the FPKIT_SEED environment variable, else 0.
std::uint64_t effective_seed(const ExperimentConfig& config);

aoi::Scenario to_aoi_scenario(const AoiConfig& c);
radar::Scenario to_radar_scenario(const RadarConfig& c);
secure::Scenario to_secure_scenario(const SecureConfig& c);

/// Writes trace.csv, summary.json and baselines.csv into out_dir.
int run_experiment(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                   std::ostream& log);
/// Writes sweep.csv (one row per sweep point) plus per-point traces.
int run_sweep(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
              std::ostream& log);

}  // namespace fpkit::experiment
