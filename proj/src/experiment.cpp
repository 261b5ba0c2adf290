#include "fpkit/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <locale>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "fpkit/errors.hpp"
#include "fpkit/parallel.hpp"
#include "fpkit/units.hpp"

namespace fpkit::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Parsing helpers. `path` is the dotted location used in diagnostics.

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "config" : path, "expected an object");
  return j;
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ConfigError(join(path, item.key()), "unknown key");
  }
}

const json& require(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(join(path, key), "missing required field");
  return j.at(key);
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(field, "must be finite");
  return d;
}

int as_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
  return v.get<int>();
}

std::vector<double> number_list(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> int_list(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "expected a list of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_int(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

// A scalar broadcasts to `count` entries; a list must have exactly `count`.
std::vector<double> per_entity(const json& v, const std::string& field, int count) {
  if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(count), as_number(v, field));
  std::vector<double> out = number_list(v, field);
  if (out.size() != static_cast<std::size_t>(count)) {
    throw ConfigError(field, "expected " + std::to_string(count) + " entries");
  }
  return out;
}

std::vector<int> per_entity_int(const json& v, const std::string& field, int count) {
  if (v.is_number_integer()) return std::vector<int>(static_cast<std::size_t>(count), as_int(v, field));
  std::vector<int> out = int_list(v, field);
  if (out.size() != static_cast<std::size_t>(count)) {
    throw ConfigError(field, "expected " + std::to_string(count) + " entries");
  }
  return out;
}

std::vector<std::vector<double>> matrix(const json& v, const std::string& field, int rows, int cols) {
  if (!v.is_array() || v.size() != static_cast<std::size_t>(rows)) {
    throw ConfigError(field, "expected " + std::to_string(rows) + " rows");
  }
  std::vector<std::vector<double>> out;
  for (int r = 0; r < rows; ++r) {
    const std::string rf = field + "[" + std::to_string(r) + "]";
    out.push_back(number_list(v[static_cast<std::size_t>(r)], rf));
    if (out.back().size() != static_cast<std::size_t>(cols)) {
      throw ConfigError(rf, "expected " + std::to_string(cols) + " entries");
    }
  }
  return out;
}

int positive_int(const json& j, const std::string& path, const std::string& key) {
  const int v = as_int(require(j, path, key), join(path, key));
  if (v < 1) throw ConfigError(join(path, key), "must be at least 1");
  return v;
}

Kind parse_kind(const json& v) {
  if (!v.is_string()) throw ConfigError("experiment", "expected a string");
  const auto s = v.get<std::string>();
  if (s == "aoi") return Kind::Aoi;
  if (s == "radar") return Kind::Radar;
  if (s == "secure") return Kind::Secure;
  if (s == "secure-tradeoff") return Kind::SecureTradeoff;
  throw ConfigError("experiment", "must be one of aoi, radar, secure, secure-tradeoff (got '" + s + "')");
}

SolveOptions parse_solver(const json& j) {
  const std::string path = "solver";
  require_object(j, path);
  check_keys(j, path, {"outer_tol", "max_outer", "inner_tol", "max_inner", "armijo_c",
                       "backtrack_factor", "eps_safeguard"});
  SolveOptions o;
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = as_number(j.at(key), join(path, key));
  };
  auto integer = [&](const char* key, int& dst) {
    if (j.contains(key)) dst = as_int(j.at(key), join(path, key));
  };
  num("outer_tol", o.outer_tol);
  integer("max_outer", o.max_outer);
  num("inner_tol", o.inner_tol);
  integer("max_inner", o.max_inner);
  num("armijo_c", o.armijo_c);
  num("backtrack_factor", o.backtrack_factor);
  num("eps_safeguard", o.eps_safeguard);
  try {
    o.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(path, e.what());
  }
  return o;
}

AoiConfig parse_aoi(const json& j) {
  const std::string path = "scenario";
  check_keys(j, path, {"K", "mu"});
  AoiConfig c;
  c.K = positive_int(j, path, "K");
  c.mu = as_number(require(j, path, "mu"), "scenario.mu");
  if (!(c.mu > 0.0)) throw ConfigError("scenario.mu", "must be positive");
  return c;
}

RadarConfig parse_radar(const json& j) {
  const std::string path = "scenario";
  check_keys(j, path, {"M", "L", "n_tx", "n_rx", "theta_pi", "beta", "sigma2_dbm", "power_dbm"});
  RadarConfig c;
  c.M = positive_int(j, path, "M");
  c.L = positive_int(j, path, "L");
  c.n_tx = per_entity_int(require(j, path, "n_tx"), "scenario.n_tx", c.M);
  c.n_rx = per_entity_int(require(j, path, "n_rx"), "scenario.n_rx", c.M);
  c.theta_pi = per_entity(require(j, path, "theta_pi"), "scenario.theta_pi", c.M);
  if (j.contains("beta") && !j.at("beta").is_number()) {
    c.beta = matrix(j.at("beta"), "scenario.beta", c.M, c.M);
  } else {
    const double b = j.contains("beta") ? as_number(j.at("beta"), "scenario.beta") : 1.0;
    c.beta.assign(static_cast<std::size_t>(c.M), std::vector<double>(static_cast<std::size_t>(c.M), b));
  }
  c.sigma2_dbm = per_entity(require(j, path, "sigma2_dbm"), "scenario.sigma2_dbm", c.M);
  c.power_dbm = per_entity(require(j, path, "power_dbm"), "scenario.power_dbm", c.M);
  for (int m = 0; m < c.M; ++m) {
    const auto i = static_cast<std::size_t>(m);
    if (c.n_tx[i] < 1) throw ConfigError("scenario.n_tx", "antenna counts must be at least 1");
    if (c.n_rx[i] < 1) throw ConfigError("scenario.n_rx", "antenna counts must be at least 1");
  }
  return c;
}

SecureConfig parse_secure(const json& j, Kind kind) {
  const std::string path = "scenario";
  std::set<std::string> keys = {"L", "K", "h2", "ht2", "sigma2_dbm", "sigma2_tilde_dbm", "P_dbm",
                                "baseline_grid_points"};
  keys.insert(kind == Kind::Secure ? "w" : "eta");
  check_keys(j, path, keys);
  SecureConfig c;
  c.L = positive_int(j, path, "L");
  c.K = as_int(require(j, path, "K"), "scenario.K");
  if (c.K < 0 || c.K > c.L) throw ConfigError("scenario.K", "must lie in [0, L]");
  c.h2 = matrix(require(j, path, "h2"), "scenario.h2", c.L, c.L);
  c.ht2 = c.K == 0 && !j.contains("ht2") ? std::vector<std::vector<double>>{}
                                         : matrix(require(j, path, "ht2"), "scenario.ht2", c.K, c.L);
  c.sigma2_dbm = per_entity(require(j, path, "sigma2_dbm"), "scenario.sigma2_dbm", c.L);
  c.sigma2_tilde_dbm = c.K == 0 && !j.contains("sigma2_tilde_dbm")
                           ? std::vector<double>{}
                           : per_entity(require(j, path, "sigma2_tilde_dbm"), "scenario.sigma2_tilde_dbm", c.K);
  c.P_dbm = as_number(require(j, path, "P_dbm"), "scenario.P_dbm");
  if (kind == Kind::Secure) {
    c.w = per_entity(require(j, path, "w"), "scenario.w", c.L);
    for (double v : c.w) {
      if (v < 0.0) throw ConfigError("scenario.w", "weights must be nonnegative");
    }
  } else if (j.contains("eta")) {
    c.eta = as_number(j.at("eta"), "scenario.eta");
    if (*c.eta < 0.0) throw ConfigError("scenario.eta", "must be nonnegative");
  }
  if (j.contains("baseline_grid_points")) {
    c.baseline_grid_points = as_int(j.at("baseline_grid_points"), "scenario.baseline_grid_points");
    if (c.baseline_grid_points < 2) throw ConfigError("scenario.baseline_grid_points", "must be at least 2");
  }
  return c;
}

std::string sweep_axis(Kind kind) {
  switch (kind) {
    case Kind::Aoi: return "K";
    case Kind::Radar: return "power_dbm";
    case Kind::Secure: return "P_dbm";
    case Kind::SecureTradeoff: return "eta";
  }
  return "";
}

SweepConfig parse_sweep(const json& j, Kind kind) {
  const std::string path = "sweep";
  require_object(j, path);
  const std::string axis = sweep_axis(kind);
  check_keys(j, path, {axis});
  const std::string field = join(path, axis);
  const json& v = require(j, path, axis);
  SweepConfig s;
  s.axis = axis;
  if (v.is_object()) {
    check_keys(v, field, {"min", "max", "count", "scale"});
    const double lo = as_number(require(v, field, "min"), field + ".min");
    const double hi = as_number(require(v, field, "max"), field + ".max");
    const int count = positive_int(v, field, "count");
    std::string scale = "linear";
    if (v.contains("scale")) {
      if (!v.at("scale").is_string()) throw ConfigError(field + ".scale", "expected a string");
      scale = v.at("scale").get<std::string>();
    }
    if (hi < lo) throw ConfigError(field + ".max", "must not be below min");
    if (scale == "log") {
      if (!(lo > 0.0)) throw ConfigError(field + ".min", "must be positive for log spacing");
      s.values = secure::log_spaced(lo, hi, count);
    } else if (scale == "linear") {
      for (int i = 0; i < count; ++i) {
        s.values.push_back(count == 1 ? lo : (i == count - 1 ? hi : lo + (hi - lo) * i / (count - 1)));
      }
    } else {
      throw ConfigError(field + ".scale", "must be 'linear' or 'log'");
    }
  } else {
    s.values = number_list(v, field);
  }
  if (s.values.empty()) throw ConfigError(field, "needs at least one value");
  for (double x : s.values) {
    if (axis == "K" && (x != std::floor(x) || x < 1.0)) {
      throw ConfigError(field, "K values must be positive integers");
    }
    if (axis == "eta" && x < 0.0) throw ConfigError(field, "eta values must be nonnegative");
  }
  return s;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.precision(17);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// Output helpers.

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string trace_csv(const IterationTrace& trace) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << "iter,objective,wall_ms,inner_iters\n";
  for (const auto& r : trace.records) {
    s << r.outer_index << "," << fmt(r.objective) << "," << fmt(r.wall_ms) << "," << r.inner_iterations
      << "\n";
  }
  return s.str();
}

std::string status_name(TerminalStatus s) {
  return s == TerminalStatus::Converged ? "converged" : "max_iterations";
}

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::string csv_table(const std::string& header, const std::vector<std::string>& rows) {
  std::string out = header + "\n";
  for (const auto& r : rows) out += r + "\n";
  return out;
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
  return out;
}

SolveOptions solve_options(const ExperimentConfig& c) {
  SolveOptions o = c.solver;
  o.seed = effective_seed(c);
  return o;
}

// ---------------------------------------------------------------------------
// Per-experiment computations. Each returns the summary and fills the trace
// and baseline rows; nothing touches the filesystem here.

struct RunOutput {
  json summary;
  std::vector<std::pair<std::string, IterationTrace>> traces;  // file name, trace
  std::vector<std::string> baseline_rows;                     // method,value,unit
  std::vector<std::string> sweep_cells;
};

RunOutput compute_aoi(const aoi::Scenario& sc, const SolveOptions& opts, bool oracle) {
  RunOutput out;
  const auto alg = aoi::run_algorithm1(sc, opts);
  const auto eq = aoi::baseline_equal_rate(sc);
  const auto mx = aoi::baseline_max_rate(sc);
  const double stat = stationarity_residual(aoi::build_problem(sc), alg.solution.lambda);
  const double v = alg.solution.sum_aoi;
  json& s = out.summary;
  s["experiment"] = "aoi";
  s["K"] = sc.K;
  s["mu"] = sc.mu;
  s["final_sum_aoi"] = v;
  s["iterations"] = alg.trace.outer_iterations();
  s["status"] = status_name(alg.trace.status);
  s["stationarity"] = stat;
  s["lambda"] = vec_json(alg.solution.lambda);
  s["baselines"] = {{"equal_rate", eq.sum_aoi}, {"max_rate", mx.sum_aoi}};
  s["improvement_vs_equal_rate"] = 1.0 - v / eq.sum_aoi;
  s["improvement_vs_max_rate"] = 1.0 - v / mx.sum_aoi;
  out.baseline_rows = {csv_row({"rate_control", fmt(v), "sum_aoi"}),
                       csv_row({"equal_rate", fmt(eq.sum_aoi), "sum_aoi"}),
                       csv_row({"max_rate", fmt(mx.sum_aoi), "sum_aoi"})};
  if (oracle) {
    const auto orc = aoi::oracle_grid(sc);
    s["oracle"] = orc.sum_aoi;
    s["oracle_gap_rel"] = (v - orc.sum_aoi) / orc.sum_aoi;
    out.baseline_rows.push_back(csv_row({"oracle_grid", fmt(orc.sum_aoi), "sum_aoi"}));
  } else {
    s["oracle"] = nullptr;
  }
  out.traces.emplace_back("trace.csv", alg.trace);
  out.sweep_cells = {std::to_string(sc.K), fmt(v), std::to_string(alg.trace.outer_iterations()),
                     fmt(eq.sum_aoi), fmt(mx.sum_aoi), fmt(1.0 - v / eq.sum_aoi),
                     fmt(1.0 - v / mx.sum_aoi)};
  return out;
}

const char* kAoiSweepHeader =
    "K,sum_aoi,iterations,equal_rate,max_rate,improvement_vs_equal_rate,improvement_vs_max_rate";

RunOutput compute_radar(const radar::Scenario& sc, const SolveOptions& opts) {
  RunOutput out;
  const auto alg = radar::run_algorithm2(sc, opts);
  const double init = alg.trace.records.front().objective;
  const double fin = alg.trace.final_objective();
  json& s = out.summary;
  s["experiment"] = "radar";
  s["initial_sum_crb"] = init;
  s["final_sum_crb"] = fin;
  s["reduction"] = 1.0 - fin / init;
  s["iterations"] = alg.trace.outer_iterations();
  s["status"] = status_name(alg.trace.status);
  s["stationarity"] = alg.stationarity;
  s["baselines"] = {{"flat_max_power", init}};
  out.baseline_rows = {csv_row({"waveform_design", fmt(fin), "sum_crb"}),
                       csv_row({"flat_max_power", fmt(init), "sum_crb"})};
  out.traces.emplace_back("trace.csv", alg.trace);
  out.sweep_cells = {fmt(init), fmt(fin), fmt(1.0 - fin / init),
                     std::to_string(alg.trace.outer_iterations()), fmt(alg.stationarity)};
  return out;
}

const char* kRadarSweepHeader = "power_dbm,initial_sum_crb,final_sum_crb,reduction,iterations,stationarity";

json power_json(const secure::Scenario& sc, const secure::PowerResult& r, double stat) {
  json j;
  j["value_nats"] = r.value;
  j["value_bits"] = nats_to_bits(r.value);
  j["iterations"] = r.trace.outer_iterations();
  j["status"] = status_name(r.trace.status);
  j["stationarity"] = stat;
  j["p_mw"] = vec_json(r.p);
  json rates = json::array();
  for (int i = 0; i < sc.L; ++i) rates.push_back(nats_to_bits(secure::secret_rate(sc, r.p, i)));
  j["rates_bits"] = rates;
  return j;
}

RunOutput compute_secure(const secure::Scenario& sc, const SolveOptions& opts, bool oracle,
                         int grid_points) {
  RunOutput out;
  const auto fast = secure::run_algorithm4(sc, opts);
  const auto direct = secure::run_algorithm3(sc, opts);
  const auto base = secure::baseline_max_power_linear_search(sc, grid_points);
  const MixedFpProblem problem = secure::build_direct_problem(sc);
  json& s = out.summary;
  s["experiment"] = "secure";
  s["fast"] = power_json(sc, fast, stationarity_residual(problem, fast.p));
  s["direct"] = power_json(sc, direct, stationarity_residual(problem, direct.p));
  s["baselines"] = {{"max_power_linear_search",
                     {{"value_nats", base.value}, {"value_bits", nats_to_bits(base.value)},
                      {"p_mw", vec_json(base.p)}}}};
  out.baseline_rows = {csv_row({"fast_fp", fmt(fast.value), "nats"}),
                       csv_row({"direct_fp", fmt(direct.value), "nats"}),
                       csv_row({"max_power_linear_search", fmt(base.value), "nats"})};
  if (oracle) {
    const auto orc = secure::oracle_grid_2d(sc);
    s["oracle"] = {{"value_nats", orc.value}, {"value_bits", nats_to_bits(orc.value)},
                   {"p_mw", vec_json(orc.p)}};
    out.baseline_rows.push_back(csv_row({"oracle_grid", fmt(orc.value), "nats"}));
  } else {
    s["oracle"] = nullptr;
  }
  out.traces.emplace_back("trace.csv", fast.trace);
  out.traces.emplace_back("trace_direct.csv", direct.trace);
  out.sweep_cells = {fmt(fast.value), fmt(nats_to_bits(fast.value)),
                     std::to_string(fast.trace.outer_iterations()), fmt(direct.value),
                     fmt(nats_to_bits(direct.value)), std::to_string(direct.trace.outer_iterations()),
                     fmt(base.value), fmt(nats_to_bits(base.value))};
  return out;
}

const char* kSecureSweepHeader =
    "P_dbm,fast_nats,fast_bits,fast_iterations,direct_nats,direct_bits,direct_iterations,"
    "baseline_nats,baseline_bits";

std::pair<double, double> split_bits(const secure::Scenario& sc, const Vector& p) {
  double eaves = 0.0;
  double plain = 0.0;
  for (int i = 0; i < sc.L; ++i) (i < sc.K ? eaves : plain) += nats_to_bits(secure::secret_rate(sc, p, i));
  return {eaves, plain};
}

RunOutput compute_tradeoff_point(const secure::Scenario& base, double eta, const SolveOptions& opts,
                                 int grid_points) {
  const secure::Scenario sc = secure::with_tradeoff_weights(base, eta);
  RunOutput out = compute_secure(sc, opts, false, grid_points);
  out.summary["experiment"] = "secure-tradeoff";
  out.summary["eta"] = eta;
  const auto& fast_p = out.summary["fast"]["p_mw"].get<std::vector<double>>();
  const auto& direct_p = out.summary["direct"]["p_mw"].get<std::vector<double>>();
  const auto& base_p =
      out.summary["baselines"]["max_power_linear_search"]["p_mw"].get<std::vector<double>>();
  auto as_vec = [](const std::vector<double>& v) { return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()))); };
  const auto [fe, fp] = split_bits(sc, as_vec(fast_p));
  const auto [de, dp] = split_bits(sc, as_vec(direct_p));
  const auto [be, bp] = split_bits(sc, as_vec(base_p));
  out.summary["fast"]["eavesdropped_bits"] = fe;
  out.summary["fast"]["other_bits"] = fp;
  out.summary["direct"]["eavesdropped_bits"] = de;
  out.summary["direct"]["other_bits"] = dp;
  out.summary["baselines"]["max_power_linear_search"]["eavesdropped_bits"] = be;
  out.summary["baselines"]["max_power_linear_search"]["other_bits"] = bp;
  out.sweep_cells = {fmt(fe),
                     fmt(fp),
                     fmt(out.summary["fast"]["value_nats"].get<double>()),
                     fmt(de),
                     fmt(dp),
                     fmt(out.summary["direct"]["value_nats"].get<double>()),
                     fmt(be),
                     fmt(bp),
                     fmt(out.summary["baselines"]["max_power_linear_search"]["value_nats"].get<double>())};
  return out;
}

const char* kTradeoffSweepHeader =
    "eta,fast_eavesdropped_bits,fast_other_bits,fast_weighted_nats,direct_eavesdropped_bits,"
    "direct_other_bits,direct_weighted_nats,baseline_eavesdropped_bits,baseline_other_bits,"
    "baseline_weighted_nats";

// Scenario conversion wrapped so validation failures surface as config errors.
template <typename F>
auto scenario_or_config_error(F&& f) {
  try {
    return f();
  } catch (const InvalidInput& e) {
    throw ConfigError("scenario", e.what());
  }
}

void validate_semantics(const ExperimentConfig& c, bool sweeping) {
  switch (c.kind) {
    case Kind::Aoi:
      scenario_or_config_error([&] { return to_aoi_scenario(c.aoi); });
      if (c.oracle) {
        int maxK = c.aoi.K;
        if (sweeping && c.sweep) {
          for (double k : c.sweep->values) maxK = std::max(maxK, static_cast<int>(k));
        }
        if (maxK > 3) throw ConfigError("oracle", "the AoI grid oracle supports K <= 3 only");
      }
      break;
    case Kind::Radar:
      scenario_or_config_error([&] { return to_radar_scenario(c.radar); });
      if (c.oracle) throw ConfigError("oracle", "no oracle exists for the radar experiment");
      break;
    case Kind::Secure:
      scenario_or_config_error([&] { return to_secure_scenario(c.secure); });
      if (c.oracle && c.secure.L != 2) throw ConfigError("oracle", "the secure grid oracle needs L = 2");
      break;
    case Kind::SecureTradeoff:
      scenario_or_config_error([&] { return to_secure_scenario(c.secure); });
      if (c.oracle) throw ConfigError("oracle", "not available for secure-tradeoff");
      if (!sweeping && !c.secure.eta) throw ConfigError("scenario.eta", "missing required field");
      break;
  }
  if (sweeping && !c.sweep) throw ConfigError("sweep", "missing required field");
}

template <typename Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    body();
    return kOk;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    log << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    log << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const InvariantViolation& e) {
    log << "invariant violation: " << e.what() << "\n";
    return kInvariantViolation;
  } catch (const std::exception& e) {
    log << "solver failure: " << e.what() << "\n";
    return kInvariantViolation;
  }
}

void write_outputs(const fs::path& out_dir, const RunOutput& out, const std::string& prefix) {
  for (const auto& [name, trace] : out.traces) write_file(out_dir / (prefix + name), trace_csv(trace));
}

}  // namespace

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  const auto& x = a.solver;
  const auto& y = b.solver;
  return a.kind == b.kind && a.seed == b.seed && a.oracle == b.oracle && a.aoi == b.aoi &&
         a.radar == b.radar && a.secure == b.secure && a.sweep == b.sweep &&
         x.outer_tol == y.outer_tol && x.max_outer == y.max_outer && x.inner_tol == y.inner_tol &&
         x.max_inner == y.max_inner && x.armijo_c == y.armijo_c &&
         x.backtrack_factor == y.backtrack_factor && x.eps_safeguard == y.eps_safeguard;
}

std::string kind_name(Kind kind) {
  switch (kind) {
    case Kind::Aoi: return "aoi";
    case Kind::Radar: return "radar";
    case Kind::Secure: return "secure";
    case Kind::SecureTradeoff: return "secure-tradeoff";
  }
  return "";
}

ExperimentConfig parse_config(const json& j) {
  require_object(j, "");
  check_keys(j, "", {"experiment", "seed", "solver", "oracle", "scenario", "sweep"});
  ExperimentConfig c;
  c.kind = parse_kind(require(j, "", "experiment"));
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ConfigError("seed", "expected a nonnegative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("solver")) c.solver = parse_solver(j.at("solver"));
  if (j.contains("oracle")) {
    if (!j.at("oracle").is_boolean()) throw ConfigError("oracle", "expected true or false");
    c.oracle = j.at("oracle").get<bool>();
  }
  const json& sc = require_object(require(j, "", "scenario"), "scenario");
  switch (c.kind) {
    case Kind::Aoi: c.aoi = parse_aoi(sc); break;
    case Kind::Radar: c.radar = parse_radar(sc); break;
    case Kind::Secure:
    case Kind::SecureTradeoff: c.secure = parse_secure(sc, c.kind); break;
  }
  if (j.contains("sweep")) c.sweep = parse_sweep(j.at("sweep"), c.kind);
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = kind_name(c.kind);
  if (c.seed) j["seed"] = *c.seed;
  j["oracle"] = c.oracle;
  j["solver"] = {{"outer_tol", c.solver.outer_tol},   {"max_outer", c.solver.max_outer},
                 {"inner_tol", c.solver.inner_tol},   {"max_inner", c.solver.max_inner},
                 {"armijo_c", c.solver.armijo_c},     {"backtrack_factor", c.solver.backtrack_factor},
                 {"eps_safeguard", c.solver.eps_safeguard}};
  switch (c.kind) {
    case Kind::Aoi: j["scenario"] = {{"K", c.aoi.K}, {"mu", c.aoi.mu}}; break;
    case Kind::Radar:
      j["scenario"] = {{"M", c.radar.M},
                       {"L", c.radar.L},
                       {"n_tx", c.radar.n_tx},
                       {"n_rx", c.radar.n_rx},
                       {"theta_pi", c.radar.theta_pi},
                       {"beta", c.radar.beta},
                       {"sigma2_dbm", c.radar.sigma2_dbm},
                       {"power_dbm", c.radar.power_dbm}};
      break;
    case Kind::Secure:
    case Kind::SecureTradeoff: {
      json s = {{"L", c.secure.L},
                {"K", c.secure.K},
                {"h2", c.secure.h2},
                {"ht2", c.secure.ht2},
                {"sigma2_dbm", c.secure.sigma2_dbm},
                {"sigma2_tilde_dbm", c.secure.sigma2_tilde_dbm},
                {"P_dbm", c.secure.P_dbm},
                {"baseline_grid_points", c.secure.baseline_grid_points}};
      if (c.kind == Kind::Secure) s["w"] = c.secure.w;
      if (c.kind == Kind::SecureTradeoff && c.secure.eta) s["eta"] = *c.secure.eta;
      j["scenario"] = s;
      break;
    }
  }
  if (c.sweep) {
    if (c.sweep->axis == "K") {
      std::vector<int> ks;
      for (double v : c.sweep->values) ks.push_back(static_cast<int>(v));
      j["sweep"] = {{"K", ks}};
    } else {
      j["sweep"] = {{c.sweep->axis, c.sweep->values}};
    }
  }
  return j;
}

std::uint64_t effective_seed(const ExperimentConfig& config) {
  if (config.seed) return *config.seed;
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(kSeedEnv, "must be a nonnegative integer");
  }
  return 0;
}

aoi::Scenario to_aoi_scenario(const AoiConfig& c) {
  aoi::Scenario sc{c.K, c.mu};
  sc.validate();
  return sc;
}

radar::Scenario to_radar_scenario(const RadarConfig& c) {
  radar::Scenario sc;
  sc.M = c.M;
  sc.L = c.L;
  sc.n_tx = c.n_tx;
  sc.n_rx = c.n_rx;
  for (double t : c.theta_pi) sc.theta.push_back(t * std::numbers::pi);
  sc.beta = ComplexMatrix(c.M, c.M);
  if (c.beta.size() != static_cast<std::size_t>(c.M)) throw InvalidInput("radar scenario: beta must be M x M");
  for (int i = 0; i < c.M; ++i) {
    const auto& row = c.beta[static_cast<std::size_t>(i)];
    if (row.size() != static_cast<std::size_t>(c.M)) throw InvalidInput("radar scenario: beta must be M x M");
    for (int k = 0; k < c.M; ++k) sc.beta(i, k) = row[static_cast<std::size_t>(k)];
  }
  for (double v : c.sigma2_dbm) sc.sigma2.push_back(dbm_to_mw(v));
  for (double v : c.power_dbm) sc.power.push_back(dbm_to_mw(v));
  sc.validate();
  return sc;
}

secure::Scenario to_secure_scenario(const SecureConfig& c) {
  secure::Scenario sc;
  sc.L = c.L;
  sc.K = c.K;
  auto to_matrix = [](const std::vector<std::vector<double>>& m, int rows, int cols) {
    if (m.size() != static_cast<std::size_t>(rows)) throw InvalidInput("secure scenario: matrix shape");
    secure::Matrix out(rows, cols);
    for (int r = 0; r < rows; ++r) {
      const auto& row = m[static_cast<std::size_t>(r)];
      if (row.size() != static_cast<std::size_t>(cols)) throw InvalidInput("secure scenario: matrix shape");
      for (int k = 0; k < cols; ++k) out(r, k) = row[static_cast<std::size_t>(k)];
    }
    return out;
  };
  sc.h2 = to_matrix(c.h2, c.L, c.L);
  sc.ht2 = to_matrix(c.ht2, c.K, c.L);
  for (double v : c.sigma2_dbm) sc.sigma2.push_back(dbm_to_mw(v));
  for (double v : c.sigma2_tilde_dbm) sc.sigma2_tilde.push_back(dbm_to_mw(v));
  sc.P = dbm_to_mw(c.P_dbm);
  sc.w = c.w.empty() ? std::vector<double>(static_cast<std::size_t>(c.L), 1.0) : c.w;
  sc.validate();
  return sc;
}

int run_experiment(const fs::path& config_path, const fs::path& out_dir, std::ostream& log) {
  return guarded(log, [&] {
    const ExperimentConfig c = load_config(config_path);
    validate_semantics(c, false);
    const SolveOptions opts = solve_options(c);
    fs::create_directories(out_dir);

    RunOutput out;
    switch (c.kind) {
      case Kind::Aoi: out = compute_aoi(to_aoi_scenario(c.aoi), opts, c.oracle); break;
      case Kind::Radar: out = compute_radar(to_radar_scenario(c.radar), opts); break;
      case Kind::Secure:
        out = compute_secure(to_secure_scenario(c.secure), opts, c.oracle, c.secure.baseline_grid_points);
        break;
      case Kind::SecureTradeoff:
        out = compute_tradeoff_point(to_secure_scenario(c.secure), *c.secure.eta, opts,
                                     c.secure.baseline_grid_points);
        break;
    }
    out.summary["seed"] = opts.seed;
    write_outputs(out_dir, out, "");
    write_file(out_dir / "summary.json", out.summary.dump(2) + "\n");
    write_file(out_dir / "baselines.csv", csv_table("method,value,unit", out.baseline_rows));
    log << kind_name(c.kind) << ": wrote " << (out_dir / "trace.csv").string() << ", summary.json, baselines.csv\n";
  });
}

int run_sweep(const fs::path& config_path, const fs::path& out_dir, std::ostream& log) {
  return guarded(log, [&] {
    const ExperimentConfig c = load_config(config_path);
    validate_semantics(c, true);
    const SolveOptions opts = solve_options(c);
    const std::vector<double>& values = c.sweep->values;
    // Every point is checked before any compute starts.
    for (double v : values) {
      switch (c.kind) {
        case Kind::Aoi: {
          AoiConfig a = c.aoi;
          a.K = static_cast<int>(v);
          scenario_or_config_error([&] { return to_aoi_scenario(a); });
          break;
        }
        case Kind::Radar: {
          RadarConfig r = c.radar;
          r.power_dbm.assign(r.power_dbm.size(), v);
          scenario_or_config_error([&] { return to_radar_scenario(r); });
          break;
        }
        case Kind::Secure: {
          SecureConfig s = c.secure;
          s.P_dbm = v;
          scenario_or_config_error([&] { return to_secure_scenario(s); });
          break;
        }
        case Kind::SecureTradeoff: break;
      }
    }
    fs::create_directories(out_dir);

    std::vector<RunOutput> outputs(values.size());
    parallel_for(values.size(), [&](std::size_t i) {
      const double v = values[i];
      switch (c.kind) {
        case Kind::Aoi: {
          AoiConfig a = c.aoi;
          a.K = static_cast<int>(v);
          outputs[i] = compute_aoi(to_aoi_scenario(a), opts, c.oracle);
          break;
        }
        case Kind::Radar: {
          RadarConfig r = c.radar;
          r.power_dbm.assign(r.power_dbm.size(), v);
          outputs[i] = compute_radar(to_radar_scenario(r), opts);
          break;
        }
        case Kind::Secure: {
          SecureConfig s = c.secure;
          s.P_dbm = v;
          outputs[i] = compute_secure(to_secure_scenario(s), opts, c.oracle, s.baseline_grid_points);
          break;
        }
        case Kind::SecureTradeoff:
          outputs[i] = compute_tradeoff_point(to_secure_scenario(c.secure), v, opts,
                                              c.secure.baseline_grid_points);
          break;
      }
    });

    std::string header;
    switch (c.kind) {
      case Kind::Aoi: header = kAoiSweepHeader; break;
      case Kind::Radar: header = kRadarSweepHeader; break;
      case Kind::Secure: header = kSecureSweepHeader; break;
      case Kind::SecureTradeoff: header = kTradeoffSweepHeader; break;
    }
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::vector<std::string> cells = outputs[i].sweep_cells;
      // The K column is already part of the AoI cells.
      if (c.kind != Kind::Aoi) cells.insert(cells.begin(), fmt(values[i]));
      rows.push_back(csv_row(cells));
      write_outputs(out_dir, outputs[i], "point" + std::to_string(i) + "_");
    }
    write_file(out_dir / "sweep.csv", csv_table(header, rows));
    log << kind_name(c.kind) << " sweep: " << rows.size() << " points written to "
        << (out_dir / "sweep.csv").string() << "\n";
  });
}

}  // namespace fpkit::experiment
