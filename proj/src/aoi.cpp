#include "fpkit/aoi.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fpkit/errors.hpp"

namespace fpkit::aoi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double prefix_load(int k, const Vector& lambda, double mu) {
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += lambda[i] / mu;
  return s;
}

void check_index(int k, const Vector& lambda, double mu) {
  if (!(mu > 0.0)) throw InvalidInput("aoi: mu must be positive");
  if (k < 0 || k >= lambda.size()) throw InvalidInput("aoi: source index out of range");
  if ((lambda.array() < 0.0).any()) throw InvalidInput("aoi: rates must be nonnegative");
}

// Enumerates the Cartesian product of per-axis candidate lists.
template <typename Visit>
void for_each_grid_point(const std::vector<std::vector<double>>& axes, Visit&& visit) {
  const std::size_t K = axes.size();
  std::vector<std::size_t> idx(K, 0);
  Vector point(static_cast<Eigen::Index>(K));
  while (true) {
    for (std::size_t k = 0; k < K; ++k) point[static_cast<Eigen::Index>(k)] = axes[k][idx[k]];
    visit(point);
    std::size_t k = 0;
    while (k < K && ++idx[k] == axes[k].size()) idx[k++] = 0;
    if (k == K) break;
  }
}

}  // namespace

void Scenario::validate() const {
  if (K < 1) throw InvalidInput("aoi scenario: K must be at least 1");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidInput("aoi scenario: mu must be positive");
}

double avg_aoi(int k, const Vector& lambda, double mu) {
  check_index(k, lambda, mu);
  if (lambda[k] == 0.0) return kInf;
  const double r = lambda[k] / mu;
  const double h = prefix_load(k, lambda, mu);
  const double num = 1.0 + r + 3.0 * h + 3.0 * h * r + 3.0 * h * h + h * h * r + h * h * h;
  return num / (mu * r * (1.0 + h));
}

std::pair<double, double> avg_aoi_decomposed(int k, const Vector& lambda, double mu) {
  check_index(k, lambda, mu);
  const double h = prefix_load(k, lambda, mu);
  const double first = (h * h + 3.0 * h + 1.0) / (mu * (1.0 + h));
  if (lambda[k] == 0.0) return {first, kInf};
  const double r = lambda[k] / mu;
  return {first, (h + 1.0) * (h + 1.0) / (mu * r)};
}

double sum_aoi(const Vector& lambda, double mu) {
  double total = 0.0;
  for (int k = 0; k < lambda.size(); ++k) total += avg_aoi(k, lambda, mu);
  return total;
}

MixedFpProblem build_problem(const Scenario& scenario) {
  scenario.validate();
  const int K = scenario.K;
  const double mu = scenario.mu;
  std::vector<RatioTerm> terms;
  terms.reserve(2 * static_cast<std::size_t>(K));

  auto prefix_grad = [K, mu](int k) {
    Vector g = Vector::Zero(K);
    g.head(k).setConstant(1.0 / mu);
    return g;
  };

  for (int k = 0; k < K; ++k) {
    SmoothFn num = [k, mu, prefix_grad](const Vector& lam) {
      const double h = prefix_load(k, lam, mu);
      return ValueGrad{h * h + 3.0 * h + 1.0, (2.0 * h + 3.0) * prefix_grad(k)};
    };
    SmoothFn den = [k, mu, prefix_grad](const Vector& lam) {
      const double h = prefix_load(k, lam, mu);
      return ValueGrad{mu * (1.0 + h), mu * prefix_grad(k)};
    };
    terms.emplace_back(std::move(num), std::move(den), OuterFunction::neg_identity(), Side::Min);
  }
  for (int k = 0; k < K; ++k) {
    SmoothFn num = [k, mu, prefix_grad](const Vector& lam) {
      const double h = prefix_load(k, lam, mu);
      return ValueGrad{(h + 1.0) * (h + 1.0), 2.0 * (h + 1.0) * prefix_grad(k)};
    };
    SmoothFn den = [k, K](const Vector& lam) {
      Vector g = Vector::Zero(K);
      g[k] = 1.0;
      return ValueGrad{lam[k], std::move(g)};
    };
    terms.emplace_back(std::move(num), std::move(den), OuterFunction::neg_identity(), Side::Min);
  }

  const double floor = kMinRateFraction * mu;
  FeasibleSet box = FeasibleSet::box(Vector::Zero(K), Vector::Constant(K, mu));
  return MixedFpProblem(std::move(terms), box.with_domain([floor](const Vector& lam) {
    return (lam.array() > floor).all();
  }));
}

Algorithm1Result run_algorithm1(const Scenario& scenario, const SolveOptions& opts) {
  const MixedFpProblem problem = build_problem(scenario);
  const Vector x0 = Vector::Constant(scenario.K, scenario.mu / scenario.K);
  MmResult mm = run_mm(problem, x0, opts);
  Algorithm1Result out;
  out.solution.lambda = mm.x;
  out.solution.sum_aoi = sum_aoi(mm.x, scenario.mu);
  out.trace = mm.trace.negated();
  return out;
}

Solution baseline_equal_rate(const Scenario& scenario) {
  scenario.validate();
  const double mu = scenario.mu;
  const int K = scenario.K;
  auto f = [&](double rate) { return sum_aoi(Vector::Constant(K, rate), mu); };

  constexpr int kGrid = 1000;
  const double step = mu / kGrid;
  int best_i = kGrid;
  double best = f(mu);
  for (int i = 1; i < kGrid; ++i) {
    const double v = f(i * step);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }

  // Golden-section search on the bracket around the best grid point.
  double a = std::max(best_i - 1, 0) * step;
  double b = std::min(best_i + 1, kGrid) * step;
  if (a <= 0.0) a = 0.5 * step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-13 * mu) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  double rate = 0.5 * (a + b);
  double value = f(rate);
  if (best < value) {
    rate = best_i * step;
    value = best;
  }
  return {Vector::Constant(K, rate), value};
}

Solution baseline_max_rate(const Scenario& scenario) {
  scenario.validate();
  const Vector lambda = Vector::Constant(scenario.K, scenario.mu);
  return {lambda, sum_aoi(lambda, scenario.mu)};
}

Solution oracle_grid(const Scenario& scenario, double coarse_step_fraction, int refine_rounds) {
  scenario.validate();
  if (scenario.K > 3) throw InvalidInput("oracle_grid: K > 3 exceeds the exhaustive-search budget");
  if (!(coarse_step_fraction > 0.0) || coarse_step_fraction > 1.0) {
    throw InvalidInput("oracle_grid: coarse_step_fraction must lie in (0, 1]");
  }
  if (refine_rounds < 0) throw InvalidInput("oracle_grid: refine_rounds must be nonnegative");
  const int K = scenario.K;
  const double mu = scenario.mu;

  Solution best{Vector::Constant(K, mu), kInf};
  auto visit = [&](const Vector& lam) {
    const double v = sum_aoi(lam, mu);
    if (v < best.sum_aoi) best = {lam, v};
  };

  const int n = static_cast<int>(std::lround(1.0 / coarse_step_fraction));
  double step = mu / n;
  std::vector<double> axis;
  for (int i = 1; i <= n; ++i) axis.push_back(i == n ? mu : i * step);
  for_each_grid_point(std::vector<std::vector<double>>(K, axis), visit);

  for (int round = 0; round < refine_rounds; ++round) {
    const Vector center = best.lambda;
    step /= 10.0;
    std::vector<std::vector<double>> axes(K);
    for (int k = 0; k < K; ++k) {
      for (int j = -10; j <= 10; ++j) {
        const double v = center[k] + j * step;
        if (v > 0.0 && v <= mu * (1.0 + 1e-15)) axes[k].push_back(std::min(v, mu));
      }
    }
    for_each_grid_point(axes, visit);
  }
  return best;
}

}  // namespace fpkit::aoi
