#include "fpkit/secure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <tuple>

#include "fpkit/errors.hpp"
#include "fpkit/parallel.hpp"
#include "fpkit/units.hpp"

namespace fpkit::secure {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

double interference(const Scenario& sc, const Vector& p, int i) {
  return sc.h2.row(i).dot(p) - sc.h2(i, i) * p[i];
}

double eaves_total(const Scenario& sc, const Vector& p, int k) { return sc.ht2.row(k).dot(p); }

void check_power(const Scenario& sc, const Vector& p) {
  if (p.size() != sc.L) throw InvalidInput("power vector must have L entries");
}

void check_link(const Scenario& sc, int i) {
  if (i < 0 || i >= sc.L) throw InvalidInput("link index out of range");
}

Vector unit(int L, int i, double v) {
  Vector g = Vector::Zero(L);
  g[i] = v;
  return g;
}

}  // namespace

void Scenario::validate() const {
  if (L < 1) throw InvalidInput("secure scenario: L must be at least 1");
  if (K < 0 || K > L) throw InvalidInput("secure scenario: K must lie in [0, L]");
  if (h2.rows() != L || h2.cols() != L) throw InvalidInput("secure scenario: h2 must be L x L");
  if (ht2.rows() != K || ht2.cols() != L) throw InvalidInput("secure scenario: ht2 must be K x L");
  if (sigma2.size() != idx(L)) throw InvalidInput("secure scenario: sigma2 must have L entries");
  if (sigma2_tilde.size() != idx(K)) {
    throw InvalidInput("secure scenario: sigma2_tilde must have K entries");
  }
  if (w.size() != idx(L)) throw InvalidInput("secure scenario: w must have L entries");
  if (!(P > 0.0) || !std::isfinite(P)) throw InvalidInput("secure scenario: P must be positive");
  if (!h2.allFinite() || (h2.array() < 0.0).any()) {
    throw InvalidInput("secure scenario: h2 gains must be nonnegative");
  }
  if (!ht2.allFinite() || (ht2.array() < 0.0).any()) {
    throw InvalidInput("secure scenario: ht2 gains must be nonnegative");
  }
  for (int i = 0; i < L; ++i) {
    if (!(h2(i, i) > 0.0)) throw InvalidInput("secure scenario: h2 diagonal must be positive");
    if (!(sigma2[idx(i)] > 0.0)) throw InvalidInput("secure scenario: sigma2 must be positive");
    if (!(w[idx(i)] >= 0.0) || !std::isfinite(w[idx(i)])) {
      throw InvalidInput("secure scenario: w must be nonnegative");
    }
  }
  for (int k = 0; k < K; ++k) {
    if (!(ht2(k, k) > 0.0)) throw InvalidInput("secure scenario: ht2 diagonal must be positive");
    if (!(sigma2_tilde[idx(k)] > 0.0)) {
      throw InvalidInput("secure scenario: sigma2_tilde must be positive");
    }
  }
}

Scenario Scenario::reference_two_link() {
  Scenario sc;
  sc.L = 2;
  sc.K = 2;
  sc.h2.resize(2, 2);
  sc.h2 << 1.0, 0.1, 0.09, 0.87;
  sc.ht2.resize(2, 2);
  sc.ht2 << 0.5, 0.11, 0.13, 0.39;
  sc.sigma2 = {dbm_to_mw(-10.0), dbm_to_mw(-10.0)};
  sc.sigma2_tilde = {dbm_to_mw(0.0), dbm_to_mw(0.0)};
  sc.P = dbm_to_mw(10.0);
  sc.w = {1.0, 1.0};
  return sc;
}

Scenario Scenario::reference_five_link(double eta) {
  Scenario sc;
  sc.L = 5;
  sc.K = 2;
  sc.h2 = Matrix::Constant(5, 5, 0.1);
  const double diag[5] = {1.0, 0.74, 0.85, 0.93, 0.61};
  for (int i = 0; i < 5; ++i) sc.h2(i, i) = diag[i];
  sc.ht2 = Matrix::Constant(2, 5, 0.1);
  sc.ht2(0, 0) = 0.50;
  sc.ht2(1, 1) = 0.15;
  sc.sigma2.assign(5, dbm_to_mw(-10.0));
  sc.sigma2_tilde.assign(2, dbm_to_mw(0.0));
  sc.P = dbm_to_mw(10.0);
  sc.w = {1.0, 1.0, eta, eta, eta};
  return sc;
}

double sinr(const Scenario& sc, const Vector& p, int i) {
  check_power(sc, p);
  check_link(sc, i);
  return sc.h2(i, i) * p[i] / (interference(sc, p, i) + sc.sigma2[idx(i)]);
}

double eavesdropper_sinr(const Scenario& sc, const Vector& p, int k) {
  check_power(sc, p);
  if (k < 0 || k >= sc.K) throw InvalidInput("eavesdropper index out of range");
  const double own = sc.ht2(k, k) * p[k];
  return own / (eaves_total(sc, p, k) - own + sc.sigma2_tilde[idx(k)]);
}

double secret_rate(const Scenario& sc, const Vector& p, int i) {
  const double r = std::log1p(sinr(sc, p, i));
  if (i >= sc.K) return r;
  return r - std::log1p(eavesdropper_sinr(sc, p, i));
}

double secret_rate_rewritten(const Scenario& sc, const Vector& p, int i) {
  const double r = std::log1p(sinr(sc, p, i));
  if (i >= sc.K) return r;
  const double leak = sc.ht2(i, i) * p[i] / (eaves_total(sc, p, i) + sc.sigma2_tilde[idx(i)]);
  return r + std::log1p(-leak);
}

double weighted_sum_rate(const Scenario& sc, const Vector& p) {
  double total = 0.0;
  for (int i = 0; i < sc.L; ++i) {
    if (sc.w[idx(i)] != 0.0) total += sc.w[idx(i)] * secret_rate(sc, p, i);
  }
  return total;
}

FeasibleSet power_box(const Scenario& sc) {
  return FeasibleSet::box(Vector::Zero(sc.L), Vector::Constant(sc.L, sc.P));
}

MixedFpProblem build_direct_problem(const Scenario& scenario) {
  scenario.validate();
  const Scenario sc = scenario;
  const int L = sc.L;
  std::vector<RatioTerm> terms;
  for (int i = 0; i < L; ++i) {
    SmoothFn num = [sc, i, L](const Vector& p) {
      return ValueGrad{sc.h2(i, i) * p[i], unit(L, i, sc.h2(i, i))};
    };
    SmoothFn den = [sc, i](const Vector& p) {
      Vector g = sc.h2.row(i).transpose();
      g[i] = 0.0;
      return ValueGrad{interference(sc, p, i) + sc.sigma2[idx(i)], std::move(g)};
    };
    terms.emplace_back(std::move(num), std::move(den), OuterFunction::log1p(sc.w[idx(i)]),
                       Side::Max);
  }
  for (int k = 0; k < sc.K; ++k) {
    SmoothFn num = [sc, k, L](const Vector& p) {
      return ValueGrad{sc.ht2(k, k) * p[k], unit(L, k, sc.ht2(k, k))};
    };
    SmoothFn den = [sc, k](const Vector& p) {
      return ValueGrad{eaves_total(sc, p, k) + sc.sigma2_tilde[idx(k)], sc.ht2.row(k).transpose()};
    };
    terms.emplace_back(std::move(num), std::move(den), OuterFunction::log1m(sc.w[idx(k)]),
                       Side::Min);
  }
  return MixedFpProblem(std::move(terms), power_box(sc));
}

AuxState direct_fp_aux(const Scenario& scenario, const Vector& p, double eps) {
  check_power(scenario, p);
  return compute_aux(build_direct_problem(scenario), p, eps);
}

std::optional<ValueGrad> direct_fp_surrogate(const Scenario& scenario, const Vector& p,
                                             const AuxState& aux) {
  check_power(scenario, p);
  return surrogate_value_grad(build_direct_problem(scenario), p, aux);
}

PowerResult run_algorithm3(const Scenario& scenario, const SolveOptions& opts) {
  const MixedFpProblem problem = build_direct_problem(scenario);
  MmResult mm = run_mm(problem, Vector::Constant(scenario.L, scenario.P), opts);
  return {mm.x, weighted_sum_rate(scenario, mm.x), std::move(mm.trace)};
}

std::vector<LogRatioTerm> log_ratio_terms(const Scenario& scenario) {
  scenario.validate();
  const Scenario sc = scenario;
  const int L = sc.L;
  std::vector<LogRatioTerm> terms;
  for (int i = 0; i < L; ++i) {
    LogRatioTerm t;
    t.numerator = [sc, i, L](const Vector& p) {
      return ValueGrad{sc.h2(i, i) * p[i], unit(L, i, sc.h2(i, i))};
    };
    t.denominator = [sc, i](const Vector& p) {
      Vector g = sc.h2.row(i).transpose();
      g[i] = 0.0;
      return ValueGrad{interference(sc, p, i) + sc.sigma2[idx(i)], std::move(g)};
    };
    t.weight = sc.w[idx(i)];
    t.side = Side::Max;
    terms.push_back(std::move(t));
  }
  for (int k = 0; k < sc.K; ++k) {
    LogRatioTerm t;
    t.numerator = [sc, k, L](const Vector& p) {
      return ValueGrad{sc.ht2(k, k) * p[k], unit(L, k, sc.ht2(k, k))};
    };
    t.denominator = [sc, k](const Vector& p) {
      Vector g = sc.ht2.row(k).transpose();
      g[k] = 0.0;
      return ValueGrad{eaves_total(sc, p, k) - sc.ht2(k, k) * p[k] + sc.sigma2_tilde[idx(k)],
                       std::move(g)};
    };
    t.weight = sc.w[idx(k)];
    t.side = Side::Min;
    terms.push_back(std::move(t));
  }
  return terms;
}

GammaState fast_fp_gamma(const Scenario& scenario, const Vector& p) {
  check_power(scenario, p);
  return compute_gammas(log_ratio_terms(scenario), p);
}

double fast_fp_objective_fr(const Scenario& scenario, const Vector& p, const GammaState& gammas) {
  check_power(scenario, p);
  return lagrangian_value(log_ratio_terms(scenario), p, gammas);
}

SumOfRatiosForm fast_fp_ratio_form(const Scenario& scenario, const GammaState& gammas) {
  return to_sum_of_ratios(log_ratio_terms(scenario), gammas, power_box(scenario));
}

AuxState fast_fp_aux(const Scenario& scenario, const Vector& p, const GammaState& gammas,
                     double eps) {
  check_power(scenario, p);
  return compute_aux(fast_fp_ratio_form(scenario, gammas).problem, p, eps);
}

std::optional<ValueGrad> fast_fp_subproblem(const Scenario& scenario, const Vector& p,
                                            const GammaState& gammas, const AuxState& aux) {
  check_power(scenario, p);
  return surrogate_value_grad(fast_fp_ratio_form(scenario, gammas).problem, p, aux);
}

namespace {

// Each outer step refreshes gamma, then y at the same anchor, so the
// subproblem maximizes a minorizer of a minorizer of the weighted sum rate.
class SecureFastMm final : public MmProblem {
 public:
  SecureFastMm(const Scenario& scenario, double eps)
      : scenario_(scenario), terms_(log_ratio_terms(scenario)), box_(power_box(scenario)), eps_(eps) {}

  const FeasibleSet& feasible() const override { return box_; }
  double objective(const Vector& p) const override { return weighted_sum_rate(scenario_, p); }
  std::optional<Vector> objective_gradient(const Vector& p) const override {
    return finite_difference_gradient([this](const Vector& x) { return objective(x); }, p);
  }

  ConcaveObjective surrogate_at(const Vector& anchor) const override {
    const GammaState gammas = compute_gammas(terms_, anchor);
    auto form = std::make_shared<SumOfRatiosForm>(to_sum_of_ratios(terms_, gammas, box_));
    AuxState aux = compute_aux(form->problem, anchor, eps_);
    return [form, aux = std::move(aux)](const Vector& p) -> std::optional<ValueGrad> {
      auto v = surrogate_value_grad(form->problem, p, aux);
      if (v) v->value += form->constant;
      return v;
    };
  }

 private:
  Scenario scenario_;
  std::vector<LogRatioTerm> terms_;
  FeasibleSet box_;
  double eps_;
};

}  // namespace

PowerResult run_algorithm4(const Scenario& scenario, const SolveOptions& opts) {
  const SecureFastMm mm(scenario, opts.eps_safeguard);
  MmResult res = run_mm(mm, Vector::Constant(scenario.L, scenario.P), opts);
  return {res.x, weighted_sum_rate(scenario, res.x), std::move(res.trace)};
}

BaselineResult baseline_max_power_linear_search(const Scenario& scenario, int grid_points) {
  scenario.validate();
  if (grid_points < 2) throw InvalidInput("baseline: grid_points must be at least 2");
  const int L = scenario.L;

  std::vector<std::vector<int>> groups;
  if (L == 2) {
    groups = {{0}, {1}};
  } else {
    std::vector<int> eaves;
    std::vector<int> plain;
    for (int i = 0; i < L; ++i) (i < scenario.K ? eaves : plain).push_back(i);
    if (!eaves.empty()) groups.push_back(eaves);
    if (!plain.empty()) groups.push_back(plain);
  }

  BaselineResult best{Vector::Constant(L, scenario.P), -std::numeric_limits<double>::infinity()};
  for (const auto& group : groups) {
    Vector p = Vector::Constant(L, scenario.P);
    for (int g = 0; g < grid_points; ++g) {
      const double level = scenario.P * g / (grid_points - 1);
      for (int i : group) p[i] = level;
      const double v = weighted_sum_rate(scenario, p);
      if (v > best.value) best = {p, v};
    }
  }
  return best;
}

BaselineResult oracle_grid_2d(const Scenario& scenario, double step_fraction) {
  scenario.validate();
  if (scenario.L != 2) throw InvalidInput("oracle_grid_2d: only two-link scenarios are supported");
  if (!(step_fraction > 0.0) || step_fraction > 1.0) {
    throw InvalidInput("oracle_grid_2d: step_fraction must lie in (0, 1]");
  }
  const double P = scenario.P;
  const int n = static_cast<int>(std::lround(1.0 / step_fraction));
  const double step = P / n;

  BaselineResult best{Vector::Zero(2), -std::numeric_limits<double>::infinity()};
  Vector p(2);
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= n; ++b) {
      p << (a == n ? P : a * step), (b == n ? P : b * step);
      const double v = weighted_sum_rate(scenario, p);
      if (v > best.value) best = {p, v};
    }
  }

  const Vector center = best.p;
  const double fine = step / 100.0;
  for (int a = -100; a <= 100; ++a) {
    for (int b = -100; b <= 100; ++b) {
      p << std::clamp(center[0] + a * fine, 0.0, P), std::clamp(center[1] + b * fine, 0.0, P);
      const double v = weighted_sum_rate(scenario, p);
      if (v > best.value) best = {p, v};
    }
  }
  return best;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo)) throw InvalidInput("log_spaced: need 0 < lo <= hi");
  if (count < 1) throw InvalidInput("log_spaced: count must be at least 1");
  if (count == 1) return {lo};
  std::vector<double> out;
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < count; ++i) {
    out.push_back(i == count - 1 ? hi : std::pow(10.0, a + (b - a) * i / (count - 1)));
  }
  out.front() = lo;
  return out;
}

Scenario with_tradeoff_weights(const Scenario& base, double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvalidInput("tradeoff: eta must be nonnegative");
  Scenario sc = base;
  for (int i = 0; i < sc.L; ++i) sc.w[idx(i)] = i < sc.K ? 1.0 : eta;
  return sc;
}

TradeoffPoint tradeoff_point(const Scenario& base, double eta, const SolveOptions& opts,
                             int baseline_grid_points) {
  const Scenario sc = with_tradeoff_weights(base, eta);
  auto split = [&sc](const Vector& p) {
    double secure = 0.0;
    double plain = 0.0;
    for (int i = 0; i < sc.L; ++i) (i < sc.K ? secure : plain) += nats_to_bits(secret_rate(sc, p, i));
    return std::pair{secure, plain};
  };
  TradeoffPoint pt;
  pt.eta = eta;

  const PowerResult fast = run_algorithm4(sc, opts);
  pt.p = fast.p;
  pt.weighted = fast.value;
  std::tie(pt.secure_bits, pt.plain_bits) = split(fast.p);

  const PowerResult direct = run_algorithm3(sc, opts);
  pt.p_direct = direct.p;
  pt.weighted_direct = direct.value;
  std::tie(pt.secure_bits_direct, pt.plain_bits_direct) = split(direct.p);

  const BaselineResult base_line = baseline_max_power_linear_search(sc, baseline_grid_points);
  pt.p_baseline = base_line.p;
  pt.weighted_baseline = base_line.value;
  std::tie(pt.secure_bits_baseline, pt.plain_bits_baseline) = split(base_line.p);
  return pt;
}

std::vector<TradeoffPoint> tradeoff_sweep(const Scenario& base, const std::vector<double>& etas,
                                          const SolveOptions& opts, int baseline_grid_points) {
  base.validate();
  std::vector<TradeoffPoint> points(etas.size());
  parallel_for(etas.size(), [&](std::size_t n) {
    points[n] = tradeoff_point(base, etas[n], opts, baseline_grid_points);
  });
  return points;
}

std::optional<double> interpolate(std::vector<std::pair<double, double>> points, double x) {
  if (points.empty()) return std::nullopt;
  std::sort(points.begin(), points.end());
  if (x < points.front().first || x > points.back().first) return std::nullopt;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto [x0, y0] = points[i - 1];
    const auto [x1, y1] = points[i];
    if (x <= x1) {
      if (x1 == x0) return std::max(y0, y1);
      return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
  }
  return points.back().second;
}

}  // namespace fpkit::secure
