#include "fpkit/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "fpkit/errors.hpp"

namespace fpkit {

namespace {

constexpr double kMinStep = 1e-30;
constexpr double kMaxStep = 1e30;
constexpr int kMaxBacktracks = 80;
constexpr double kMonotoneSlack = 1e-9;

}  // namespace

void SolveOptions::validate() const {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw InvalidInput(std::string("SolveOptions: invalid ") + field);
  };
  require(outer_tol > 0.0, "outer_tol");
  require(max_outer > 0, "max_outer");
  require(inner_tol > 0.0, "inner_tol");
  require(max_inner > 0, "max_inner");
  require(armijo_c > 0.0 && armijo_c < 1.0, "armijo_c");
  require(backtrack_factor > 0.0 && backtrack_factor < 1.0, "backtrack_factor");
  require(eps_safeguard > 0.0, "eps_safeguard");
}

SubproblemResult maximize_subproblem(const ConcaveObjective& objective, const FeasibleSet& feasible,
                                     const Vector& x0, const SolveOptions& opts) {
  opts.validate();
  if (!feasible.contains(x0, 1e-9) || !feasible.in_domain(x0)) {
    throw InvalidInput("maximize_subproblem: start point is not feasible");
  }
  auto start = objective(x0);
  if (!start) throw InvalidInput("maximize_subproblem: start point is outside the domain");

  SubproblemResult out;
  Vector x = x0;
  double f = start->value;
  Vector g = std::move(start->gradient);

  auto residual_at = [&](const Vector& pt, const Vector& grad) {
    return (feasible.project(pt + grad) - pt).norm();
  };

  double alpha = 1.0;
  {
    const double pg = (feasible.project(x + g) - x).lpNorm<Eigen::Infinity>();
    if (pg > 0.0) alpha = std::clamp(1.0 / pg, kMinStep, kMaxStep);
  }

  for (int it = 0; it < opts.max_inner; ++it) {
    out.residual = residual_at(x, g);
    if (out.residual <= opts.inner_tol * (1.0 + std::abs(f))) {
      out.converged = true;
      break;
    }
    const Vector d = feasible.project(x + alpha * g) - x;
    const double slope = g.dot(d);
    if (!(slope > 0.0)) {
      // No ascent left at this resolution; reset the spectral step once.
      if (alpha != 1.0) {
        alpha = 1.0;
        continue;
      }
      break;
    }

    double t = 1.0;
    bool accepted = false;
    Vector xt;
    std::optional<ValueGrad> et;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      xt = x + t * d;
      if (feasible.in_domain(xt)) {
        et = objective(xt);
        if (et && std::isfinite(et->value) && et->value >= f + opts.armijo_c * t * slope) {
          accepted = true;
          break;
        }
      }
      t *= opts.backtrack_factor;
    }
    if (!accepted) break;

    const Vector s = xt - x;
    const Vector yv = et->gradient - g;
    const double curvature = -s.dot(yv);  // >= 0 for concave objectives
    alpha = curvature > 0.0 ? std::clamp(s.squaredNorm() / curvature, kMinStep, kMaxStep)
                            : kMaxStep;

    x = std::move(xt);
    f = et->value;
    g = std::move(et->gradient);
    out.iterations = it + 1;
  }
  if (!out.converged) out.residual = residual_at(x, g);
  out.x = std::move(x);
  out.value = f;
  return out;
}

// ---------------------------------------------------------------------------

double IterationTrace::final_objective() const {
  if (records.empty()) throw InvalidInput("IterationTrace: empty trace");
  return records.back().objective;
}

bool IterationTrace::nondecreasing(double slack) const {
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double prev = records[i - 1].objective;
    if (records[i].objective < prev - slack * (1.0 + std::abs(prev))) return false;
  }
  return true;
}

bool IterationTrace::nonincreasing(double slack) const { return negated().nondecreasing(slack); }

IterationTrace IterationTrace::negated() const {
  IterationTrace out = *this;
  for (auto& r : out.records) r.objective = -r.objective;
  return out;
}

std::optional<Vector> MmProblem::objective_gradient(const Vector&) const { return std::nullopt; }

ConcaveObjective MixedFpMm::surrogate_at(const Vector& anchor) const {
  AuxState aux = compute_aux(problem_, anchor, eps_);
  return [this, aux = std::move(aux)](const Vector& x) {
    return surrogate_value_grad(problem_, x, aux);
  };
}

MmResult run_mm(const MmProblem& problem, const Vector& x0, const SolveOptions& opts) {
  opts.validate();
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };

  const FeasibleSet& feasible = problem.feasible();
  if (!feasible.contains(x0, 1e-9) || !feasible.in_domain(x0)) {
    throw InvalidInput("run_mm: start point is not feasible");
  }

  MmResult result;
  result.x = x0;
  double f = problem.objective(x0);
  result.trace.records.push_back({0, f, elapsed_ms(), 0});

  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    ConcaveObjective surrogate = problem.surrogate_at(result.x);
    const auto at_anchor = surrogate(result.x);
    if (!at_anchor) throw InvariantViolation("run_mm: surrogate undefined at its own anchor");

    // Positive rescaling keeps the subproblem's stopping rule scale-free.
    const double mag = std::abs(at_anchor->value);
    const double scale = mag > 0.0 && std::isfinite(mag) ? 1.0 / mag : 1.0;
    ConcaveObjective scaled = [&surrogate, scale](const Vector& x) -> std::optional<ValueGrad> {
      auto v = surrogate(x);
      if (v) {
        v->value *= scale;
        v->gradient *= scale;
      }
      return v;
    };

    SubproblemResult sub = maximize_subproblem(scaled, feasible, result.x, opts);
    const double f_new = problem.objective(sub.x);
    if (f_new < f - kMonotoneSlack * (1.0 + std::abs(f))) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "run_mm: objective decreased from " << f << " to " << f_new << " at outer iteration "
          << outer;
      throw InvariantViolation(msg.str());
    }
    const double change = std::abs(f_new - f);
    const double f_prev = f;
    result.x = std::move(sub.x);
    f = f_new;
    result.trace.records.push_back({outer, f, elapsed_ms(), sub.iterations});
    if (change <= opts.outer_tol * std::abs(f_prev)) {
      result.trace.status = TerminalStatus::Converged;
      break;
    }
  }
  return result;
}

MmResult run_mm(const MixedFpProblem& problem, const Vector& x0, const SolveOptions& opts) {
  MixedFpMm mm(problem, opts.eps_safeguard);
  return run_mm(mm, x0, opts);
}

Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                                  double rel_step) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * (1.0 + std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double stationarity_residual(const MmProblem& problem, const Vector& x) {
  Vector g;
  if (auto analytic = problem.objective_gradient(x)) {
    g = std::move(*analytic);
  } else {
    g = finite_difference_gradient([&](const Vector& z) { return problem.objective(z); }, x);
  }
  return (x - problem.feasible().project(x + g)).norm();
}

double stationarity_residual(const MixedFpProblem& problem, const Vector& x) {
  return stationarity_residual(MixedFpMm(problem), x);
}

}  // namespace fpkit
