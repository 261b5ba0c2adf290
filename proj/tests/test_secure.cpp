#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fpkit/errors.hpp"
#include "fpkit/secure.hpp"
#include "fpkit/units.hpp"

using namespace fpkit;
using namespace fpkit::secure;

namespace {

Scenario one_link(int K, double h, double ht, double sigma2, double sigma2_tilde, double P) {
  Scenario s;
  s.L = 1;
  s.K = K;
  s.h2 = Matrix::Constant(1, 1, h);
  s.ht2 = Matrix::Constant(K, 1, ht);
  s.sigma2 = {sigma2};
  s.sigma2_tilde = std::vector<double>(static_cast<std::size_t>(K), sigma2_tilde);
  s.P = P;
  s.w = {1.0};
  return s;
}

Scenario random_scenario(std::mt19937_64& gen, int L, int K) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Scenario s;
  s.L = L;
  s.K = K;
  s.h2 = Matrix(L, L);
  s.ht2 = Matrix(K, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) s.h2(i, j) = i == j ? u(gen) : 0.2 * u(gen);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < L; ++j) s.ht2(k, j) = k == j ? u(gen) : 0.2 * u(gen);
  for (int i = 0; i < L; ++i) s.sigma2.push_back(0.1 * u(gen));
  for (int k = 0; k < K; ++k) s.sigma2_tilde.push_back(u(gen));
  s.P = 10 * u(gen);
  for (int i = 0; i < L; ++i) s.w.push_back(u(gen));
  return s;
}

Vector random_power(std::mt19937_64& gen, const Scenario& s) {
  std::uniform_real_distribution<double> u(0.0, s.P);
  Vector p(s.L);
  for (auto& v : p) v = u(gen);
  return p;
}

}  // namespace

TEST_CASE("secret_rate") {
  const Scenario s = one_link(0, 1.0, 0.0, 1.0, 1.0, 1.0);
  CHECK(secret_rate(s, Vector::Ones(1), 0) == doctest::Approx(std::log(2.0)));
  CHECK(nats_to_bits(secret_rate(s, Vector::Ones(1), 0)) == doctest::Approx(1.0));

  const Scenario same = one_link(1, 0.7, 0.7, 0.3, 0.3, 2.0);
  CHECK(std::abs(secret_rate(same, Vector::Constant(1, 1.3), 0)) < 1e-15);

  std::mt19937_64 gen(41);
  for (int t = 0; t < 100; ++t) {
    const Scenario r = random_scenario(gen, 4, 2);
    const Vector p = random_power(gen, r);
    for (int i = 0; i < r.L; ++i)
      CHECK(secret_rate_rewritten(r, p, i) == doctest::Approx(secret_rate(r, p, i)).epsilon(1e-12));
  }
}

TEST_CASE("weighted_sum_rate") {
  std::mt19937_64 gen(43);
  Scenario r = random_scenario(gen, 3, 1);
  r.w = {0, 0, 0};
  CHECK(weighted_sum_rate(r, Vector::Constant(3, 1.0)) == 0.0);

  const Scenario ref = Scenario::reference_two_link();
  CHECK(ref.P == doctest::Approx(10.0));
  CHECK(ref.sigma2[0] == doctest::Approx(0.1));
  CHECK(ref.sigma2_tilde[0] == doctest::Approx(1.0));
  CHECK(std::isfinite(weighted_sum_rate(ref, Vector::Constant(2, ref.P))));
}

TEST_CASE("direct_fp_aux") {
  const Scenario s = one_link(0, 1.0, 0.0, 1.0, 1.0, 1.0);
  CHECK(direct_fp_aux(s, Vector::Ones(1)).y[0] == doctest::Approx(1.0));

  const Scenario e = one_link(1, 1.0, 0.5, 1.0, 1.0, 1.0);
  const AuxState z = direct_fp_aux(e, Vector::Zero(1));
  CHECK(std::isfinite(z.y_tilde[0]));
  CHECK(z.y_tilde[0] > 1e11);

  // With y~ from the anchor, Q-_k = (sum_all + s~) / (a~_kk p_k) > 1.
  std::mt19937_64 gen(47);
  const Scenario r = random_scenario(gen, 3, 2);
  const Vector p = random_power(gen, r);
  const AuxState aux = direct_fp_aux(r, p);
  for (int k = 0; k < r.K; ++k) {
    const double total = r.ht2.row(k).dot(p) + r.sigma2_tilde[k];
    const double own = r.ht2(k, k) * p[k];
    const double yt = aux.y_tilde[k];
    const double qm = 2 * yt * std::sqrt(total) - yt * yt * own;
    CHECK(qm == doctest::Approx(total / own).epsilon(1e-9));
    CHECK(qm > 1.0);
  }
}

TEST_CASE("direct surrogate: tightness and gradient") {
  std::mt19937_64 gen(53);
  for (int t = 0; t < 10; ++t) {
    const Scenario r = random_scenario(gen, 4, 2);
    const Vector p = random_power(gen, r);
    const AuxState aux = direct_fp_aux(r, p);
    const auto at = direct_fp_surrogate(r, p, aux);
    REQUIRE(at.has_value());
    CHECK(at->value == doctest::Approx(weighted_sum_rate(r, p)).epsilon(1e-10));

    const Vector q = (0.9 * p).array() + 0.05 * r.P;
    const auto sq = direct_fp_surrogate(r, q, aux);
    if (!sq) continue;
    CHECK(sq->value <= weighted_sum_rate(r, q) + 1e-10);
    const Vector fd = finite_difference_gradient(
        [&](const Vector& v) { return direct_fp_surrogate(r, v, aux)->value; }, q);
    CHECK((sq->gradient - fd).norm() <= 1e-5 * (1 + fd.norm()));
  }
}

TEST_CASE("direct problem matches the rate formula") {
  std::mt19937_64 gen(59);
  const Scenario r = random_scenario(gen, 5, 2);
  const MixedFpProblem prob = build_direct_problem(r);
  CHECK(prob.max_side_count() == 5);
  CHECK(prob.min_side_count() == 2);
  const Vector p = random_power(gen, r);
  CHECK(mixed_objective(prob, p) == doctest::Approx(weighted_sum_rate(r, p)).epsilon(1e-12));
}

TEST_CASE("run_algorithm3 on one link") {
  SolveOptions opts;
  const auto plain = run_algorithm3(one_link(0, 1.0, 0.0, 1.0, 1.0, 5.0), opts);
  CHECK(plain.p[0] == doctest::Approx(5.0));
  // Eavesdropper channel at least as good as the legitimate one: silence is best.
  const auto tapped = run_algorithm3(one_link(1, 0.5, 0.9, 1.0, 1.0, 5.0), opts);
  CHECK(tapped.p[0] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(tapped.value <= 1e-9);
  CHECK(tapped.value >= -1e-6);
}

TEST_CASE("fast method gammas, f_r and the tightness chain") {
  const Scenario s = one_link(0, 1.0, 0.0, 1.0, 1.0, 1.0);
  CHECK(fast_fp_gamma(s, Vector::Ones(1)).gamma[0] == doctest::Approx(1.0));
  const Scenario e = one_link(1, 1.0, 0.5, 1.0, 1.0, 1.0);
  CHECK(fast_fp_gamma(e, Vector::Zero(1)).gamma_tilde[0] == 0.0);

  std::mt19937_64 gen(61);
  const Scenario r = random_scenario(gen, 4, 2);
  const GammaState zero{std::vector<double>(4, 0.0), std::vector<double>(2, 0.0)};
  CHECK(fast_fp_objective_fr(r, Vector::Zero(4), zero) == doctest::Approx(0.0));

  for (int t = 0; t < 20; ++t) {
    const Vector p = random_power(gen, r);
    const GammaState g = fast_fp_gamma(r, p);
    for (double gt : g.gamma_tilde) {
      CHECK(gt >= 0.0);
      CHECK(gt < 1.0);
    }
    CHECK(fast_fp_objective_fr(r, p, g) == doctest::Approx(weighted_sum_rate(r, p)).epsilon(1e-12));

    const SumOfRatiosForm form = fast_fp_ratio_form(r, g);
    for (const auto& term : form.problem.terms())
      CHECK((term.outer.kind() == OuterKind::Identity || term.outer.kind() == OuterKind::NegIdentity));
    const AuxState aux = fast_fp_aux(r, p, g);
    const auto sub = fast_fp_subproblem(r, p, g, aux);
    REQUIRE(sub.has_value());
    CHECK(sub->value + form.constant == doctest::Approx(fast_fp_objective_fr(r, p, g)).epsilon(1e-10));

    const Vector q = (0.8 * p).array() + 0.1 * r.P;
    const auto sq = fast_fp_subproblem(r, q, g, aux);
    if (!sq) continue;
    const Vector fd = finite_difference_gradient(
        [&](const Vector& v) { return fast_fp_subproblem(r, v, g, aux)->value; }, q);
    CHECK((sq->gradient - fd).norm() <= 1e-5 * (1 + fd.norm()));
  }
  CHECK_THROWS_AS(fast_fp_objective_fr(r, Vector::Ones(4),
                                       GammaState{std::vector<double>(4, 0.0), {1.0, 0.0}}),
                  DomainError);
}

TEST_CASE("two-link reference scenario: both methods reach the grid oracle") {
  const Scenario sc = Scenario::reference_two_link();
  SolveOptions opts;
  opts.outer_tol = 1e-6;
  const auto a3 = run_algorithm3(sc, opts);
  const auto a4 = run_algorithm4(sc, opts);
  const BaselineResult oracle = oracle_grid_2d(sc);
  CHECK(std::abs(a3.value - oracle.value) <= 1e-3);
  CHECK(std::abs(a4.value - oracle.value) <= 1e-3);
  CHECK(a3.trace.nondecreasing());
  CHECK(a4.trace.nondecreasing());
  CHECK(a3.trace.records.front().objective ==
        doctest::Approx(weighted_sum_rate(sc, Vector::Constant(2, sc.P))));

  const BaselineResult base = baseline_max_power_linear_search(sc);
  CHECK(base.value <= a3.value + 1e-9);
  const BaselineResult again = baseline_max_power_linear_search(sc);
  CHECK(again.value == base.value);
  CHECK(oracle_grid_2d(sc, 2e-3).value <= oracle.value + 1e-12);
}

TEST_CASE("grid oracle and baseline edge cases") {
  Scenario sym;
  sym.L = 2;
  sym.K = 0;
  sym.h2 = Matrix::Identity(2, 2);
  sym.ht2 = Matrix(0, 2);
  sym.sigma2 = {1.0, 1.0};
  sym.P = 3.0;
  sym.w = {1.0, 1.0};
  const BaselineResult o = oracle_grid_2d(sym);
  CHECK(o.p[0] == doctest::Approx(3.0));
  CHECK(o.p[1] == doctest::Approx(3.0));

  CHECK(baseline_max_power_linear_search(one_link(0, 1.0, 0.0, 1.0, 1.0, 2.0)).p[0] ==
        doctest::Approx(2.0));
  CHECK_THROWS_AS(oracle_grid_2d(Scenario::reference_five_link(1.0)), InvalidInput);
}

TEST_CASE("tradeoff helpers") {
  const auto etas = log_spaced(1e-3, 100.0, 41);
  CHECK(etas.size() == 41);
  CHECK(etas.front() == doctest::Approx(1e-3));
  CHECK(etas.back() == doctest::Approx(100.0));
  CHECK(etas[20] == doctest::Approx(std::sqrt(1e-3 * 100.0)));

  const Scenario w = with_tradeoff_weights(Scenario::reference_five_link(1.0), 0.25);
  CHECK(w.w == std::vector<double>{1, 1, 0.25, 0.25, 0.25});

  CHECK(*interpolate({{0, 0}, {2, 4}}, 1.0) == doctest::Approx(2.0));
  CHECK(*interpolate({{2, 4}, {0, 0}}, 0.5) == doctest::Approx(1.0));
  CHECK_FALSE(interpolate({{0, 0}, {2, 4}}, 3.0).has_value());
}

TEST_CASE("tradeoff extremes") {
  const Scenario base = Scenario::reference_five_link(1.0);
  const auto low = tradeoff_point(base, 1e-3, SolveOptions{}, 201);
  const auto high = tradeoff_point(base, 100.0, SolveOptions{}, 201);
  CHECK(low.plain_bits <= high.plain_bits);
  CHECK(low.secure_bits >= high.secure_bits);
  CHECK(low.weighted >= low.weighted_baseline - 1e-9);
  CHECK(high.weighted >= high.weighted_baseline - 1e-9);
}
