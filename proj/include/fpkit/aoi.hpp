#pragma once

// Rate control for age of information. K sources share one M/M/1 server
// with rate mu under LCFS with preemption in service; source k's average AoI
// depends on its own load rho_k = lambda_k / mu and on the total load of the
// sources ahead of it, rho^_k = sum_{i<k} rho_i.

#include <utility>

#include "fpkit/fp_core.hpp"
#include "fpkit/solver.hpp"

namespace fpkit::aoi {

struct Scenario {
  int K = 1;
  double mu = 1.0;

  void validate() const;
};

/// Rates at or below this fraction of mu are outside the open domain.
inline constexpr double kMinRateFraction = 1e-9;

/// Average AoI of source k (0-based). +inf when lambda_k = 0.
double avg_aoi(int k, const Vector& lambda, double mu);

/// The two fractions whose sum is avg_aoi:
///   (rho^2 + 3 rho^ + 1) / (mu (1 + rho^))  and  (rho^ + 1)^2 / (mu rho).
std::pair<double, double> avg_aoi_decomposed(int k, const Vector& lambda, double mu);

double sum_aoi(const Vector& lambda, double mu);

/// 2K min-side NegIdentity terms over the box [0, mu]^K; the domain guard
/// excludes lambda_k <= 1e-9 mu. mixed_objective(lambda) = -sum_aoi(lambda).
MixedFpProblem build_problem(const Scenario& scenario);

struct Solution {
  Vector lambda;
  double sum_aoi = 0.0;
};

struct Algorithm1Result {
  Solution solution;
  IterationTrace trace;  // sum-AoI per outer iteration (positive sign)
};

/// MM rate control started from lambda_k = mu / K.
Algorithm1Result run_algorithm1(const Scenario& scenario, const SolveOptions& opts);

/// Common rate for all sources, found by a 1-D grid then golden-section refinement.
Solution baseline_equal_rate(const Scenario& scenario);

/// lambda_k = mu for every source.
Solution baseline_max_rate(const Scenario& scenario);

/// Exhaustive grid over (0, mu]^K, then refine_rounds local grids with step / 10
/// each round around the incumbent. Refuses K > 3.
Solution oracle_grid(const Scenario& scenario, double coarse_step_fraction = 0.02,
                     int refine_rounds = 3);

}  // namespace fpkit::aoi
