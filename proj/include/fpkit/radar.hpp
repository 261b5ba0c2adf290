#pragma once

// Multi-radar waveform design minimizing the sum of Cramer-Rao bounds on the
// direction-of-arrival estimates. Radar m transmits s_m = vec(S_m) (length
// L * n_tx[m]) and observes its own echo plus the other radars' echoes as
// interference. The CRB of radar m is 1 / J_m with
//   J_m = 2 s_m^H (I_L (x) dG_mm)^H K_m^-1 (I_L (x) dG_mm) s_m.
//
// Algorithm 2 applies the matrix quadratic transform with f+(r) = -1/(2r) on
// r_m = J_m / 2. The lifted variable U_m of the Schur-complement form is
// eliminated: U_m = s_m s_m^H is optimal for every fixed auxiliary, so the
// subproblem is solved directly over the product of power balls.

#include <cstdint>
#include <optional>
#include <vector>

#include "fpkit/fp_matrix.hpp"
#include "fpkit/solver.hpp"

namespace fpkit::radar {

struct Scenario {
  int M = 1;
  int L = 1;
  std::vector<int> n_tx;
  std::vector<int> n_rx;
  std::vector<double> theta;   // radians
  ComplexMatrix beta;          // M x M, beta(m, m') from radar m' to radar m
  std::vector<double> sigma2;  // mW
  std::vector<double> power;   // mW

  void validate() const;
  int signal_length(int m) const { return L * n_tx.at(static_cast<std::size_t>(m)); }
  int echo_length(int m) const { return L * n_rx.at(static_cast<std::size_t>(m)); }

  /// Five radars, L = 4, n_tx = (4,2,2,2,2), n_rx = (6,4,4,4,4),
  /// theta = (1/6, 1/3, 1/4, 2/5, 3/7) pi, beta = 1, equal budgets.
  static Scenario five_radar(double power_dbm, double sigma2_dbm = 0.0);
};

struct WaveformSet {
  std::vector<ComplexVector> s;
};

struct RadarAux {
  std::vector<ComplexVector> Y;
};

/// a_n = exp(-j pi (n-1) sin theta), n = 1..N.
ComplexVector steering_vector(int N, double theta);
/// d a / d theta.
ComplexVector steering_derivative(int N, double theta);

/// beta(m, m') a^R_m(theta_m) a^T_{m'}(theta_{m'})^T (plain transpose).
ComplexMatrix response_matrix(const Scenario& scenario, int m, int m_prime);
/// d G_mm / d theta_m.
ComplexMatrix response_derivative(const Scenario& scenario, int m);

/// (I_L (x) G) s for s = vec(S), S with G.cols() rows.
ComplexVector apply_kron(const ComplexMatrix& G, const ComplexVector& s, int L);
/// (I_L (x) G)^H y.
ComplexVector apply_kron_adjoint(const ComplexMatrix& G, const ComplexVector& y, int L);

/// Interference-plus-noise covariance at radar m.
ComplexMatrix covariance_K(const Scenario& scenario, const WaveformSet& w, int m);
double fisher_information(const Scenario& scenario, const WaveformSet& w, int m);
/// sum_m 1 / J_m; +inf when some J_m vanishes.
double sum_crb(const Scenario& scenario, const WaveformSet& w);

/// Y_m = K_m^-1 (I_L (x) dG_mm) s_m.
ComplexVector radar_aux_update(const Scenario& scenario, const WaveformSet& w, int m);
RadarAux radar_aux(const Scenario& scenario, const WaveformSet& w);

/// Q+_m for every radar at fixed auxiliaries.
std::vector<double> q_plus_values(const Scenario& scenario, const WaveformSet& w,
                                  const RadarAux& aux);

struct SubproblemValue {
  double value = 0.0;                     // sum_m -1 / (2 Q+_m)
  std::vector<ComplexVector> gradient;    // 2 d/d conj(s_m), i.e. (d/dRe, d/dIm) packed as complex
};

/// nullopt when some Q+_m <= 0.
std::optional<SubproblemValue> radar_subproblem_objective(const Scenario& scenario,
                                                          const WaveformSet& w,
                                                          const RadarAux& aux);

/// Lifted objective sum_m -1/(2 r_m) with Lambda_m built from explicit
/// U_{m'} = s_{m'} s_{m'}^H and Kronecker products.
double schur_lift_objective(const Scenario& scenario, const WaveformSet& w);
/// Smallest eigenvalue over m of [[U_m, s_m], [s_m^H, 1]] with U_m = s_m s_m^H.
double schur_lift_min_eigenvalue(const WaveformSet& w);

std::vector<std::size_t> block_sizes(const Scenario& scenario);
Vector pack(const WaveformSet& w);
WaveformSet unpack(const Scenario& scenario, const Vector& x);

/// s_m = sqrt(P_m / (L n_tx[m])) * 1, perturbed by seeded noise of relative
/// size 1e-3 when the flat waveform has a vanishing derivative signal.
WaveformSet initial_waveforms(const Scenario& scenario, std::uint64_t seed);

/// MM view: maximizes -sum_crb over the product of power balls.
class RadarMm final : public MmProblem {
 public:
  explicit RadarMm(const Scenario& scenario);

  const FeasibleSet& feasible() const override { return feasible_; }
  double objective(const Vector& x) const override;
  ConcaveObjective surrogate_at(const Vector& anchor) const override;

 private:
  Scenario scenario_;
  FeasibleSet feasible_;
};

struct Algorithm2Result {
  WaveformSet waveforms;
  IterationTrace trace;  // sum_crb per outer iteration
  double stationarity = 0.0;
};

Algorithm2Result run_algorithm2(const Scenario& scenario, const SolveOptions& opts);

}  // namespace fpkit::radar
