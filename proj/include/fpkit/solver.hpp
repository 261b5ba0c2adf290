#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fpkit/feasible_set.hpp"
#include "fpkit/fp_core.hpp"

namespace fpkit {

struct SolveOptions {
  double outer_tol = 1e-8;
  int max_outer = 500;
  double inner_tol = 1e-7;
  int max_inner = 10000;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double eps_safeguard = kDefaultEps;
  std::uint64_t seed = 0;

  /// Throws InvalidInput naming the offending field.
  void validate() const;
};

/// Concave objective on an open domain: nullopt means "outside the domain".
using ConcaveObjective = std::function<std::optional<ValueGrad>(const Vector&)>;

struct SubproblemResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Projected gradient ascent with spectral (Barzilai-Borwein) step lengths and
/// Armijo backtracking along the feasible direction P(x + a g) - x. A trial
/// point is accepted only if it lies in the objective's domain and in
/// feasible.in_domain, so accepted values never decrease.
SubproblemResult maximize_subproblem(const ConcaveObjective& objective, const FeasibleSet& feasible,
                                     const Vector& x0, const SolveOptions& opts);

struct TraceRecord {
  int outer_index = 0;
  double objective = 0.0;  // nats for log objectives; maximization convention
  double wall_ms = 0.0;    // elapsed since the start of the run
  int inner_iterations = 0;
};

enum class TerminalStatus { Converged, MaxIterations };

struct IterationTrace {
  std::vector<TraceRecord> records;
  TerminalStatus status = TerminalStatus::MaxIterations;

  std::size_t outer_iterations() const noexcept {
    return records.empty() ? 0 : records.size() - 1;
  }
  double final_objective() const;
  /// True when no record drops below its predecessor by more than slack*(1+|f|).
  bool nondecreasing(double slack = 1e-9) const;
  bool nonincreasing(double slack = 1e-9) const;
  /// Same records with objective sign flipped (for minimization reporting).
  IterationTrace negated() const;
};

/// A problem solvable by minorization-maximization: a true objective to
/// maximize plus a closed-form auxiliary update that yields a concave
/// surrogate tight at the anchor.
class MmProblem {
 public:
  virtual ~MmProblem() = default;
  virtual const FeasibleSet& feasible() const = 0;
  virtual double objective(const Vector& x) const = 0;
  /// Analytic gradient of the true objective when available.
  virtual std::optional<Vector> objective_gradient(const Vector& x) const;
  virtual ConcaveObjective surrogate_at(const Vector& anchor) const = 0;
};

/// MM view of a scalar mixed max-and-min FP problem (unified quadratic transform).
class MixedFpMm final : public MmProblem {
 public:
  explicit MixedFpMm(const MixedFpProblem& problem, double eps = kDefaultEps)
      : problem_(problem), eps_(eps) {}

  const FeasibleSet& feasible() const override { return problem_.feasible(); }
  double objective(const Vector& x) const override { return mixed_objective(problem_, x); }
  std::optional<Vector> objective_gradient(const Vector& x) const override {
    return mixed_objective_gradient(problem_, x);
  }
  ConcaveObjective surrogate_at(const Vector& anchor) const override;

 private:
  const MixedFpProblem& problem_;
  double eps_;
};

struct MmResult {
  Vector x;
  IterationTrace trace;
};

/// Alternates the auxiliary update with a subproblem solve until the relative
/// objective change drops to outer_tol. Record 0 is the starting point.
/// Throws InvariantViolation if the true objective decreases by more than
/// 1e-9 * (1 + |f|) between outer iterations.
MmResult run_mm(const MmProblem& problem, const Vector& x0, const SolveOptions& opts);
MmResult run_mm(const MixedFpProblem& problem, const Vector& x0, const SolveOptions& opts);

/// Central finite differences with step 1e-6 * (1 + |x_i|).
Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                                  double rel_step = 1e-6);

/// |x - P(x + grad f(x))|; analytic gradient when available, else finite differences.
double stationarity_residual(const MmProblem& problem, const Vector& x);
double stationarity_residual(const MixedFpProblem& problem, const Vector& x);

}  // namespace fpkit
