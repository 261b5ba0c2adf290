#include <doctest.h>

#include <cmath>
#include <random>

#include "fpkit/errors.hpp"
#include "fpkit/lagrangian_dual.hpp"

using namespace fpkit;

namespace {

SmoothFn affine(double c0, double c1) {
  return [c0, c1](const Vector& x) { return ValueGrad{c0 + c1 * x[0], Vector::Constant(1, c1)}; };
}

Vector scalar(double v) { return Vector::Constant(1, v); }

}  // namespace

TEST_CASE("opt_gamma and opt_gamma_tilde") {
  CHECK(opt_gamma(1, 2) == doctest::Approx(0.5));
  CHECK(opt_gamma(0, 5) == 0.0);
  CHECK(opt_gamma(3, 3) == doctest::Approx(1.0));
  CHECK_THROWS_AS(opt_gamma(1, 0), InvalidInput);

  CHECK(opt_gamma_tilde(1, 3) == doctest::Approx(0.25));
  CHECK(opt_gamma_tilde(0, 1) == 0.0);
  CHECK(opt_gamma_tilde(1, 1) == doctest::Approx(0.5));
  CHECK(opt_gamma_tilde(1e300, 1e-300) <= kGammaTildeCap);
}

TEST_CASE("zeta_plus") {
  CHECK(zeta_plus(1, 1, 1, 1) == doctest::Approx(std::log(2.0)));
  CHECK(zeta_plus(1, 0, 0, 1) == 0.0);
  CHECK(zeta_plus(2, 0, 1, 1) == doctest::Approx(1.0));
  CHECK(zeta_plus(2, 0, 1, 1) <= 2 * std::log(2.0));
}

TEST_CASE("zeta_minus") {
  CHECK(zeta_minus(1, 0.5, 1, 1) == doctest::Approx(-std::log(2.0)));
  CHECK(zeta_minus(1, 0, 0, 1) == 0.0);
  CHECK(zeta_minus(1, 0, 1, 1) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(zeta_minus(1, 1.0, 1, 1), DomainError);
}

TEST_CASE("closed forms recover the log terms and are stationary") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 500; ++i) {
    const double w = u(gen), A = u(gen), B = u(gen);
    const double g = opt_gamma(A, B), gt = opt_gamma_tilde(A, B);
    CHECK(zeta_plus(w, g, A, B) == doctest::Approx(w * std::log1p(A / B)).epsilon(1e-12));
    CHECK(zeta_minus(w, gt, A, B) == doctest::Approx(-w * std::log1p(A / B)).epsilon(1e-12));

    const double h = 1e-6;
    CHECK(std::abs((zeta_plus(w, g + h, A, B) - zeta_plus(w, g - h, A, B)) / (2 * h)) < 1e-6 * (1 + w));
    if (gt > 2 * h && gt < 1 - 2 * h)
      CHECK(std::abs((zeta_minus(w, gt + h, A, B) - zeta_minus(w, gt - h, A, B)) / (2 * h)) <
            1e-5 * (1 + w) / (1 - gt));

    // Any other gamma gives a lower value.
    CHECK(zeta_plus(w, g * 1.3 + 0.1, A, B) <= w * std::log1p(A / B) + 1e-12);
    CHECK(zeta_minus(w, gt * 0.5, A, B) <= -w * std::log1p(A / B) + 1e-12);
  }
}

TEST_CASE("log_ratio_surrogate") {
  // Single max term A = x, B = 1: anchor ratio 1, x ratio 3.
  const std::vector<LogRatioTerm> one{{affine(0, 1), affine(1, 0), 1.0, Side::Max}};
  CHECK(log_ratio_surrogate(one, scalar(3), scalar(1)) ==
        doctest::Approx(std::log(2.0) + 0.5));
  CHECK(log_ratio_surrogate(one, scalar(3), scalar(1)) <= std::log(4.0));
  CHECK(log_ratio_surrogate(one, scalar(2), scalar(2)) ==
        doctest::Approx(log_ratio_objective(one, scalar(2))));

  // All-min instance against direct evaluation.
  const std::vector<LogRatioTerm> mins{{affine(0.5, 1), affine(1, 0.2), 1.5, Side::Min},
                                       {affine(2, -0.5), affine(0.3, 1), 0.7, Side::Min}};
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const Vector x = scalar(u(gen)), a = scalar(u(gen));
    CHECK(log_ratio_surrogate(mins, x, a) <= log_ratio_objective(mins, x) + 1e-10);
  }
}

TEST_CASE("zero-weight terms drop out of the surrogate") {
  const std::vector<LogRatioTerm> t{{affine(0, 1), affine(1, 0), 0.0, Side::Min},
                                    {affine(0, 1), affine(1, 0), 1.0, Side::Max}};
  GammaState g = compute_gammas(t, scalar(1));
  CHECK(lagrangian_value(t, scalar(2), g) ==
        doctest::Approx(zeta_plus(1, g.gamma[0], 2, 1)));
}

TEST_CASE("sum-of-ratios form reproduces the Lagrangian value") {
  const std::vector<LogRatioTerm> t{{affine(0.2, 1), affine(1, 0.3), 1.2, Side::Max},
                                    {affine(0.1, 0.5), affine(2, 0.1), 0.8, Side::Min}};
  const FeasibleSet box = FeasibleSet::box(Vector::Zero(1), Vector::Constant(1, 4));
  const GammaState g = compute_gammas(t, scalar(1.5));
  const SumOfRatiosForm form = to_sum_of_ratios(t, g, box);
  // The form holds only plain Identity / NegIdentity outers: no logarithm of x.
  for (const auto& term : form.problem.terms())
    CHECK((term.outer.kind() == OuterKind::Identity || term.outer.kind() == OuterKind::NegIdentity));
  for (double x = 0.0; x <= 4.0; x += 0.25)
    CHECK(form.constant + mixed_objective(form.problem, scalar(x)) ==
          doctest::Approx(lagrangian_value(t, scalar(x), g)).epsilon(1e-12));
}
