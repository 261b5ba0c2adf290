#pragma once

// Generalized Lagrangian dual transform for weighted log-ratio objectives
//     sum_{max} w ln(1 + A/B) - sum_{min} w ln(1 + A/B).
// With gamma, gamma~ held fixed the transformed objective depends on x only
// through plain ratios, so the x-subproblem is a sum-of-ratios problem.

#include <vector>

#include "fpkit/fp_core.hpp"

namespace fpkit {

inline constexpr double kGammaTildeCap = 1.0 - 1e-12;

struct LogRatioTerm {
  SmoothFn numerator;
  SmoothFn denominator;
  double weight = 1.0;
  Side side = Side::Max;
};

struct GammaState {
  std::vector<double> gamma;        // one per max-side term
  std::vector<double> gamma_tilde;  // one per min-side term, in [0, 1)
};

/// A / B.
double opt_gamma(double A, double B);
/// A / (A + B), clamped to [0, 1 - 1e-12].
double opt_gamma_tilde(double A, double B);

/// w ln(1 + gamma) - w gamma + w (1 + gamma) A / (A + B).
double zeta_plus(double w, double gamma, double A, double B);
/// w ln(1 - gamma~) + w gamma~ - w (1 - gamma~) A / B. Throws DomainError if gamma~ >= 1.
double zeta_minus(double w, double gamma_tilde, double A, double B);

double log_ratio_objective(const std::vector<LogRatioTerm>& terms, const Vector& x);

GammaState compute_gammas(const std::vector<LogRatioTerm>& terms, const Vector& anchor);

/// Sum of zeta+ and zeta- at x for fixed gammas. Zero-weight terms contribute nothing.
double lagrangian_value(const std::vector<LogRatioTerm>& terms, const Vector& x,
                        const GammaState& gammas);

/// g(x | anchor): lagrangian_value with gammas computed at anchor.
double log_ratio_surrogate(const std::vector<LogRatioTerm>& terms, const Vector& x,
                           const Vector& anchor);

/// For fixed gammas, lagrangian_value(x) = constant + mixed_objective(problem, x)
/// where problem carries only Identity / NegIdentity outers:
///   max side: w (1 + gamma) A / (A + B)
///   min side: -(w (1 - gamma~) A) / B
struct SumOfRatiosForm {
  MixedFpProblem problem;
  double constant;
};

SumOfRatiosForm to_sum_of_ratios(const std::vector<LogRatioTerm>& terms, const GammaState& gammas,
                                 const FeasibleSet& feasible);

}  // namespace fpkit
