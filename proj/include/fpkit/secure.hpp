#pragma once

// Secure-transmission power control. L single-antenna links share a band;
// the first K links are each overheard by one eavesdropper. Link i's rate is
//   R_i = ln(1 + SINR_i) - ln(1 + SINR~_i)   (i < K)
//   R_i = ln(1 + SINR_i)                     (i >= K)
// and the goal is max sum_i w_i R_i over 0 <= p_i <= P.
//
// The direct method treats the problem as mixed max-and-min FP through
//   ln(1 + SINR~_k) = -ln(1 - a~_kk p_k / (sum_j a~_kj p_j + s~_k)).
// The fast method first moves every ratio out of its logarithm (Lagrangian
// dual transform), which leaves a sum-of-ratios problem with no logarithm of p.

#include <optional>
#include <vector>

#include "fpkit/fp_core.hpp"
#include "fpkit/lagrangian_dual.hpp"
#include "fpkit/solver.hpp"

namespace fpkit::secure {

using Matrix = Eigen::MatrixXd;

struct Scenario {
  int L = 1;
  int K = 0;
  Matrix h2;                        // L x L, h2(i, j) = |h_ij|^2 from transmitter j to receiver i
  Matrix ht2;                       // K x L, eavesdropper k's gain from transmitter j
  std::vector<double> sigma2;       // L, mW
  std::vector<double> sigma2_tilde; // K, mW
  double P = 1.0;                   // mW
  std::vector<double> w;            // L

  void validate() const;

  /// Two links, both eavesdropped; sigma2 = -10 dBm, sigma2~ = 0 dBm, P = 10 dBm.
  static Scenario reference_two_link();
  /// Five links, the first two eavesdropped; w = (1, 1, eta, eta, eta).
  static Scenario reference_five_link(double eta);
};

double sinr(const Scenario& scenario, const Vector& p, int i);
/// a~_kk p_k / (sum_{j != k} a~_kj p_j + s~_k).
double eavesdropper_sinr(const Scenario& scenario, const Vector& p, int k);

/// Nats; may be negative.
double secret_rate(const Scenario& scenario, const Vector& p, int i);
/// ln(1 + SINR_i) + ln(1 - a~_ii p_i / (sum_all a~_ij p_j + s~_i)) for i < K.
double secret_rate_rewritten(const Scenario& scenario, const Vector& p, int i);
double weighted_sum_rate(const Scenario& scenario, const Vector& p);

FeasibleSet power_box(const Scenario& scenario);

/// Direct method: L WeightedLog1p max-side terms followed by K WeightedLog1m
/// min-side terms. mixed_objective equals weighted_sum_rate.
MixedFpProblem build_direct_problem(const Scenario& scenario);

/// y_i = sqrt(h_ii p_i) / (interference_i + s_i); y~_k = sqrt(sum_all + s~_k) / (a~_kk p_k + eps).
AuxState direct_fp_aux(const Scenario& scenario, const Vector& p, double eps = kDefaultEps);
/// Weighted direct surrogate value and gradient; nullopt when p must be rejected.
std::optional<ValueGrad> direct_fp_surrogate(const Scenario& scenario, const Vector& p,
                                             const AuxState& aux);

struct PowerResult {
  Vector p;
  double value = 0.0;  // weighted sum rate, nats
  IterationTrace trace;
};

/// Direct FP power control from p = P * 1.
PowerResult run_algorithm3(const Scenario& scenario, const SolveOptions& opts);

/// Log-ratio view: L max-side terms (SINR_i) and K min-side terms (SINR~_k).
std::vector<LogRatioTerm> log_ratio_terms(const Scenario& scenario);

/// gamma_i = SINR_i; gamma~_k = a~_kk p_k / (sum_all a~_kj p_j + s~_k).
GammaState fast_fp_gamma(const Scenario& scenario, const Vector& p);
/// Transformed objective f_r(p, gamma, gamma~) in nats.
double fast_fp_objective_fr(const Scenario& scenario, const Vector& p, const GammaState& gammas);

/// Sum-of-ratios form at fixed gammas; f_r = constant + mixed_objective(problem).
SumOfRatiosForm fast_fp_ratio_form(const Scenario& scenario, const GammaState& gammas);
/// y_i = sqrt(w_i (1 + gamma_i) h_ii p_i) / (sum_all h_ij p_j + s_i),
/// y~_k = sqrt(sum_{j != k} a~_kj p_j + s~_k) / (w_k (1 - gamma~_k) a~_kk p_k + eps).
AuxState fast_fp_aux(const Scenario& scenario, const Vector& p, const GammaState& gammas,
                     double eps = kDefaultEps);
/// sum Q+_i - sum 1/Q-_k (constant of f_r excluded); nullopt when p must be rejected.
std::optional<ValueGrad> fast_fp_subproblem(const Scenario& scenario, const Vector& p,
                                            const GammaState& gammas, const AuxState& aux);

/// Fast FP power control from p = P * 1: gamma update, then y update, then one
/// concave maximization per outer iteration.
PowerResult run_algorithm4(const Scenario& scenario, const SolveOptions& opts);

struct BaselineResult {
  Vector p;
  double value = 0.0;
};

/// Links are split into groups (two links: one group each; otherwise the
/// eavesdropped links and the rest). Each group in turn is scanned over
/// grid_points levels in [0, P] with every other group held at P; the best
/// point wins.
BaselineResult baseline_max_power_linear_search(const Scenario& scenario, int grid_points = 2001);

/// Exhaustive grid with spacing step_fraction * P, then one refinement with
/// spacing step / 100 over the neighbouring cells. Refuses L != 2.
BaselineResult oracle_grid_2d(const Scenario& scenario, double step_fraction = 1e-3);

struct TradeoffPoint {
  double eta = 0.0;
  Vector p;
  double secure_bits = 0.0;  // sum of rates over the eavesdropped links
  double plain_bits = 0.0;   // sum over the remaining links
  double weighted = 0.0;     // nats
  Vector p_direct;
  double secure_bits_direct = 0.0;
  double plain_bits_direct = 0.0;
  double weighted_direct = 0.0;
  Vector p_baseline;
  double secure_bits_baseline = 0.0;
  double plain_bits_baseline = 0.0;
  double weighted_baseline = 0.0;
};

/// eta values log-spaced over [lo, hi] inclusive.
std::vector<double> log_spaced(double lo, double hi, int count);

/// base with w_i = 1 on the eavesdropped links and eta elsewhere.
Scenario with_tradeoff_weights(const Scenario& base, double eta);

/// Solves one tradeoff point: fast method, direct method and grouped baseline.
TradeoffPoint tradeoff_point(const Scenario& base, double eta, const SolveOptions& opts,
                             int baseline_grid_points = 2001);

/// tradeoff_point for each eta; points are solved concurrently.
std::vector<TradeoffPoint> tradeoff_sweep(const Scenario& base, const std::vector<double>& etas,
                                          const SolveOptions& opts, int baseline_grid_points = 2001);

/// Linear interpolation of y(x) through the points ordered by x; nullopt when
/// x lies outside their range.
std::optional<double> interpolate(std::vector<std::pair<double, double>> points, double x);

}  // namespace fpkit::secure
