#include "fpkit/radar.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "fpkit/errors.hpp"
#include "fpkit/units.hpp"

namespace fpkit::radar {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t idx(int m) { return static_cast<std::size_t>(m); }

void check_radar_index(const Scenario& sc, int m) {
  if (m < 0 || m >= sc.M) throw InvalidInput("radar index out of range");
}

void check_waveforms(const Scenario& sc, const WaveformSet& w) {
  if (static_cast<int>(w.s.size()) != sc.M) throw InvalidInput("one waveform per radar required");
  for (int m = 0; m < sc.M; ++m) {
    if (w.s[idx(m)].size() != sc.signal_length(m)) {
      throw InvalidInput("waveform " + std::to_string(m) + " has the wrong length");
    }
  }
}

}  // namespace

void Scenario::validate() const {
  if (M < 1) throw InvalidInput("radar scenario: M must be at least 1");
  if (L < 1) throw InvalidInput("radar scenario: L must be at least 1");
  const auto m = idx(M);
  if (n_tx.size() != m || n_rx.size() != m || theta.size() != m || sigma2.size() != m ||
      power.size() != m) {
    throw InvalidInput("radar scenario: per-radar lists must have M entries");
  }
  if (beta.rows() != M || beta.cols() != M) throw InvalidInput("radar scenario: beta must be M x M");
  for (std::size_t i = 0; i < m; ++i) {
    if (n_tx[i] < 1 || n_rx[i] < 1) throw InvalidInput("radar scenario: antenna counts must be >= 1");
    if (!(sigma2[i] > 0.0)) throw InvalidInput("radar scenario: sigma2 must be positive");
    if (!(power[i] > 0.0)) throw InvalidInput("radar scenario: P must be positive");
    if (!std::isfinite(theta[i])) throw InvalidInput("radar scenario: theta must be finite");
  }
}

Scenario Scenario::five_radar(double power_dbm, double sigma2_dbm) {
  Scenario sc;
  sc.M = 5;
  sc.L = 4;
  sc.n_tx = {4, 2, 2, 2, 2};
  sc.n_rx = {6, 4, 4, 4, 4};
  sc.theta = {kPi / 6.0, kPi / 3.0, kPi / 4.0, 2.0 * kPi / 5.0, 3.0 * kPi / 7.0};
  sc.beta = ComplexMatrix::Ones(5, 5);
  sc.sigma2.assign(5, dbm_to_mw(sigma2_dbm));
  sc.power.assign(5, dbm_to_mw(power_dbm));
  return sc;
}

ComplexVector steering_vector(int N, double theta) {
  if (N < 1) throw InvalidInput("steering_vector: N must be at least 1");
  ComplexVector a(N);
  const double phase = -kPi * std::sin(theta);
  for (int n = 0; n < N; ++n) a[n] = std::polar(1.0, phase * n);
  return a;
}

ComplexVector steering_derivative(int N, double theta) {
  if (N < 1) throw InvalidInput("steering_derivative: N must be at least 1");
  ComplexVector da(N);
  const double phase = -kPi * std::sin(theta);
  const double dphase = -kPi * std::cos(theta);
  for (int n = 0; n < N; ++n) da[n] = cd(0.0, dphase * n) * std::polar(1.0, phase * n);
  return da;
}

ComplexMatrix response_matrix(const Scenario& sc, int m, int m_prime) {
  check_radar_index(sc, m);
  check_radar_index(sc, m_prime);
  const ComplexVector aR = steering_vector(sc.n_rx[idx(m)], sc.theta[idx(m)]);
  const ComplexVector aT = steering_vector(sc.n_tx[idx(m_prime)], sc.theta[idx(m_prime)]);
  return sc.beta(m, m_prime) * aR * aT.transpose();
}

ComplexMatrix response_derivative(const Scenario& sc, int m) {
  check_radar_index(sc, m);
  const double th = sc.theta[idx(m)];
  const ComplexVector aR = steering_vector(sc.n_rx[idx(m)], th);
  const ComplexVector aT = steering_vector(sc.n_tx[idx(m)], th);
  const ComplexVector daR = steering_derivative(sc.n_rx[idx(m)], th);
  const ComplexVector daT = steering_derivative(sc.n_tx[idx(m)], th);
  return sc.beta(m, m) * (daR * aT.transpose() + aR * daT.transpose());
}

ComplexVector apply_kron(const ComplexMatrix& G, const ComplexVector& s, int L) {
  const auto nt = G.cols();
  const auto nr = G.rows();
  if (s.size() != L * nt) throw InvalidInput("apply_kron: length mismatch");
  ComplexVector out(L * nr);
  for (int l = 0; l < L; ++l) out.segment(l * nr, nr) = G * s.segment(l * nt, nt);
  return out;
}

ComplexVector apply_kron_adjoint(const ComplexMatrix& G, const ComplexVector& y, int L) {
  const auto nt = G.cols();
  const auto nr = G.rows();
  if (y.size() != L * nr) throw InvalidInput("apply_kron_adjoint: length mismatch");
  ComplexVector out(L * nt);
  for (int l = 0; l < L; ++l) out.segment(l * nt, nt) = G.adjoint() * y.segment(l * nr, nr);
  return out;
}

ComplexMatrix covariance_K(const Scenario& sc, const WaveformSet& w, int m) {
  check_radar_index(sc, m);
  check_waveforms(sc, w);
  const int n = sc.echo_length(m);
  ComplexMatrix K = sc.sigma2[idx(m)] * ComplexMatrix::Identity(n, n);
  for (int mp = 0; mp < sc.M; ++mp) {
    if (mp == m) continue;
    const ComplexVector v = apply_kron(response_matrix(sc, m, mp), w.s[idx(mp)], sc.L);
    K.noalias() += v * v.adjoint();
  }
  return hermitian_part(K);
}

namespace {

ComplexVector derivative_signal(const Scenario& sc, const WaveformSet& w, int m) {
  return apply_kron(response_derivative(sc, m), w.s[idx(m)], sc.L);
}

}  // namespace

double fisher_information(const Scenario& sc, const WaveformSet& w, int m) {
  const ComplexVector v = derivative_signal(sc, w, m);
  if (v.squaredNorm() == 0.0) return 0.0;
  const ComplexMatrix r = matrix_ratio(v, covariance_K(sc, w, m));
  return 2.0 * r(0, 0).real();
}

double sum_crb(const Scenario& sc, const WaveformSet& w) {
  double total = 0.0;
  for (int m = 0; m < sc.M; ++m) {
    const double J = fisher_information(sc, w, m);
    if (!(J > 0.0)) return kInf;
    total += 1.0 / J;
  }
  return total;
}

ComplexVector radar_aux_update(const Scenario& sc, const WaveformSet& w, int m) {
  const ComplexVector v = derivative_signal(sc, w, m);
  return opt_Y(v, covariance_K(sc, w, m)).col(0);
}

RadarAux radar_aux(const Scenario& sc, const WaveformSet& w) {
  RadarAux aux;
  aux.Y.reserve(idx(sc.M));
  for (int m = 0; m < sc.M; ++m) aux.Y.push_back(radar_aux_update(sc, w, m));
  return aux;
}

std::vector<double> q_plus_values(const Scenario& sc, const WaveformSet& w, const RadarAux& aux) {
  check_waveforms(sc, w);
  if (static_cast<int>(aux.Y.size()) != sc.M) throw InvalidInput("one auxiliary per radar required");
  std::vector<double> q(idx(sc.M));
  for (int m = 0; m < sc.M; ++m) {
    const ComplexVector& Y = aux.Y[idx(m)];
    double val = 2.0 * Y.dot(derivative_signal(sc, w, m)).real();
    for (int mp = 0; mp < sc.M; ++mp) {
      if (mp == m) continue;
      val -= std::norm(Y.dot(apply_kron(response_matrix(sc, m, mp), w.s[idx(mp)], sc.L)));
    }
    val -= sc.sigma2[idx(m)] * Y.squaredNorm();
    q[idx(m)] = val;
  }
  return q;
}

std::optional<SubproblemValue> radar_subproblem_objective(const Scenario& sc, const WaveformSet& w,
                                                          const RadarAux& aux) {
  check_waveforms(sc, w);
  if (static_cast<int>(aux.Y.size()) != sc.M) throw InvalidInput("one auxiliary per radar required");
  SubproblemValue out;
  out.gradient.reserve(idx(sc.M));
  for (int m = 0; m < sc.M; ++m) out.gradient.push_back(ComplexVector::Zero(sc.signal_length(m)));

  for (int m = 0; m < sc.M; ++m) {
    const ComplexVector& Y = aux.Y[idx(m)];
    const ComplexMatrix dG = response_derivative(sc, m);
    // dQ/d conj(s) contributions, collected before the outer chain-rule factor.
    std::vector<ComplexVector> dq(idx(sc.M));
    double q = 0.0;
    {
      const ComplexVector a = apply_kron_adjoint(dG, Y, sc.L);
      q += 2.0 * a.dot(w.s[idx(m)]).real();
      dq[idx(m)] = 2.0 * a;
    }
    for (int mp = 0; mp < sc.M; ++mp) {
      if (mp == m) continue;
      const ComplexVector b = apply_kron_adjoint(response_matrix(sc, m, mp), Y, sc.L);
      const cd inner = b.dot(w.s[idx(mp)]);
      q -= std::norm(inner);
      dq[idx(mp)] = -2.0 * b * inner;
    }
    q -= sc.sigma2[idx(m)] * Y.squaredNorm();
    if (!(q > 0.0) || !std::isfinite(q)) return std::nullopt;

    out.value += -0.5 / q;
    const double outer = 0.5 / (q * q);
    for (int k = 0; k < sc.M; ++k) {
      if (dq[idx(k)].size() > 0) out.gradient[idx(k)] += outer * dq[idx(k)];
    }
  }
  return out;
}

double schur_lift_objective(const Scenario& sc, const WaveformSet& w) {
  check_waveforms(sc, w);
  double total = 0.0;
  for (int m = 0; m < sc.M; ++m) {
    const int n = sc.echo_length(m);
    ComplexMatrix Lambda = sc.sigma2[idx(m)] * ComplexMatrix::Identity(n, n);
    const ComplexMatrix IL = ComplexMatrix::Identity(sc.L, sc.L);
    for (int mp = 0; mp < sc.M; ++mp) {
      if (mp == m) continue;
      const ComplexMatrix G = response_matrix(sc, m, mp);
      ComplexMatrix kron = ComplexMatrix::Zero(sc.L * G.rows(), sc.L * G.cols());
      for (int l = 0; l < sc.L; ++l) kron.block(l * G.rows(), l * G.cols(), G.rows(), G.cols()) = G;
      const ComplexMatrix U = w.s[idx(mp)] * w.s[idx(mp)].adjoint();
      Lambda += kron * U * kron.adjoint();
    }
    const ComplexMatrix dG = response_derivative(sc, m);
    ComplexMatrix kron_d = ComplexMatrix::Zero(sc.L * dG.rows(), sc.L * dG.cols());
    for (int l = 0; l < sc.L; ++l) {
      kron_d.block(l * dG.rows(), l * dG.cols(), dG.rows(), dG.cols()) = dG;
    }
    const ComplexMatrix sqrtV = kron_d * w.s[idx(m)];
    const double r = matrix_ratio(sqrtV, Lambda)(0, 0).real();
    if (!(r > 0.0)) return -kInf;
    total += -0.5 / r;
  }
  return total;
}

double schur_lift_min_eigenvalue(const WaveformSet& w) {
  double lo = kInf;
  for (const auto& s : w.s) {
    const auto n = s.size();
    ComplexMatrix block(n + 1, n + 1);
    block.topLeftCorner(n, n) = s * s.adjoint();
    block.topRightCorner(n, 1) = s;
    block.bottomLeftCorner(1, n) = s.adjoint();
    block(n, n) = 1.0;
    lo = std::min(lo, min_eigenvalue(block));
  }
  return lo;
}

std::vector<std::size_t> block_sizes(const Scenario& sc) {
  std::vector<std::size_t> sizes;
  for (int m = 0; m < sc.M; ++m) sizes.push_back(static_cast<std::size_t>(sc.signal_length(m)));
  return sizes;
}

Vector pack(const WaveformSet& w) { return pack_complex(w.s); }

WaveformSet unpack(const Scenario& sc, const Vector& x) {
  return {unpack_complex(x, block_sizes(sc))};
}

WaveformSet initial_waveforms(const Scenario& sc, std::uint64_t seed) {
  sc.validate();
  WaveformSet w;
  for (int m = 0; m < sc.M; ++m) {
    const int n = sc.signal_length(m);
    w.s.push_back(ComplexVector::Constant(n, cd(std::sqrt(sc.power[idx(m)] / n), 0.0)));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int m = 0; m < sc.M; ++m) {
    if (derivative_signal(sc, w, m).squaredNorm() > 0.0) continue;
    ComplexVector& s = w.s[idx(m)];
    const double scale = 1e-3 * std::sqrt(sc.power[idx(m)] / s.size());
    for (auto& v : s) v += scale * cd(noise(rng), noise(rng));
    s = project_ball(s, sc.power[idx(m)]);
  }
  return w;
}

RadarMm::RadarMm(const Scenario& scenario)
    : scenario_(scenario),
      feasible_(FeasibleSet::ball_product(block_sizes(scenario), scenario.power)) {
  scenario.validate();
}

double RadarMm::objective(const Vector& x) const { return -sum_crb(scenario_, unpack(scenario_, x)); }

ConcaveObjective RadarMm::surrogate_at(const Vector& anchor) const {
  RadarAux aux = radar_aux(scenario_, unpack(scenario_, anchor));
  return [this, aux = std::move(aux)](const Vector& x) -> std::optional<ValueGrad> {
    const auto v = radar_subproblem_objective(scenario_, unpack(scenario_, x), aux);
    if (!v) return std::nullopt;
    return ValueGrad{v->value, pack_complex(v->gradient)};
  };
}

Algorithm2Result run_algorithm2(const Scenario& scenario, const SolveOptions& opts) {
  scenario.validate();
  const RadarMm mm(scenario);
  const Vector x0 = pack(initial_waveforms(scenario, opts.seed));
  MmResult res = run_mm(mm, x0, opts);
  Algorithm2Result out;
  out.waveforms = unpack(scenario, res.x);
  out.trace = res.trace.negated();
  out.stationarity = stationarity_residual(mm, res.x);
  return out;
}

}  // namespace fpkit::radar
