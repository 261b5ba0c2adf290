#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fpkit/errors.hpp"
#include "fpkit/fp_core.hpp"

using namespace fpkit;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

SmoothFn constant(double c) {
  return [c](const Vector& x) { return ValueGrad{c, Vector::Zero(x.size())}; };
}
SmoothFn identity_fn() {
  return [](const Vector& x) {
    Vector g(1);
    g << 1.0;
    return ValueGrad{x[0], g};
  };
}
SmoothFn square_fn() {
  return [](const Vector& x) {
    Vector g(1);
    g << 2.0 * x[0];
    return ValueGrad{x[0] * x[0], g};
  };
}

Vector scalar(double v) {
  Vector x(1);
  x << v;
  return x;
}

FeasibleSet unit_box(double hi) { return FeasibleSet::box(Vector::Zero(1), Vector::Constant(1, hi)); }

}  // namespace

TEST_CASE("plus_part passes positives and clamps the rest to 0+") {
  CHECK(plus_part(3.0).value() == 3.0);
  CHECK_FALSE(plus_part(3.0).is_zero_plus());
  CHECK(plus_part(-2.0).is_zero_plus());
  CHECK(plus_part(-2.0).reciprocal().is_infinite());
  CHECK(plus_part(0.0).is_zero_plus());
  CHECK(plus_part(4.0).reciprocal().value() == doctest::Approx(0.25));
}

TEST_CASE("ExtendedReal keeps infinity apart from finite values") {
  CHECK_THROWS_AS(ExtendedReal{kInf}, InvalidInput);
  CHECK_THROWS_AS(ExtendedReal::infinity().value(), DomainError);
  CHECK(ExtendedReal::infinity().to_double() == kInf);
  CHECK((ExtendedReal(1.0) + ExtendedReal::infinity()).is_infinite());
  CHECK(ExtendedReal(1.0) < ExtendedReal::infinity());
}

TEST_CASE("quad_surrogate") {
  CHECK(quad_surrogate(4, 2, 1) == doctest::Approx(2.0));
  CHECK(quad_surrogate(4, 2, 0) == 0.0);
  CHECK(quad_surrogate(1, 1, 3) == doctest::Approx(-3.0));
  CHECK_THROWS_AS(quad_surrogate(-1, 1, 1), InvalidInput);
  CHECK_THROWS_AS(quad_surrogate(1, 0, 1), InvalidInput);
}

TEST_CASE("opt_y") {
  CHECK(opt_y(4, 2) == doctest::Approx(1.0));
  CHECK(opt_y(0, 5) == 0.0);
  CHECK(opt_y(1, 4) == doctest::Approx(0.25));
  CHECK_THROWS_AS(opt_y(1, 0), InvalidInput);
}

TEST_CASE("inv_quad_surrogate") {
  CHECK(inv_quad_surrogate(1, 4, 2).value() == doctest::Approx(0.25));
  CHECK(inv_quad_surrogate(1, 1, 1).value() == doctest::Approx(1.0));
  CHECK(inv_quad_surrogate(4, 1, 1).is_infinite());
}

TEST_CASE("opt_y_tilde") {
  // eps -> 0 limit: the smallest positive safeguard reproduces sqrt(B)/A.
  CHECK(opt_y_tilde(1, 4, std::numeric_limits<double>::denorm_min()) == doctest::Approx(2.0));
  CHECK(opt_y_tilde(0, 1, 1e-12) == doctest::Approx(1e12));
  CHECK(opt_y_tilde(3, 9) == doctest::Approx(1.0));
  CHECK_THROWS_AS(opt_y_tilde(1, 4, 0.0), InvalidInput);
}

TEST_CASE("mixed_objective") {
  MixedFpProblem sq({RatioTerm(square_fn(), constant(1), OuterFunction::identity(), Side::Max)},
                    unit_box(5));
  CHECK(mixed_objective(sq, scalar(3)) == doctest::Approx(9.0));

  MixedFpProblem neg({RatioTerm(constant(2), constant(4), OuterFunction::neg_identity(), Side::Min)},
                     unit_box(1));
  CHECK(mixed_objective(neg, scalar(0.5)) == doctest::Approx(-0.5));

  MixedFpProblem logs({RatioTerm(constant(1), constant(1), OuterFunction::log1p(), Side::Max),
                       RatioTerm(constant(3), constant(1), OuterFunction::log1p(), Side::Max)},
                      unit_box(1));
  CHECK(mixed_objective(logs, scalar(0.5)) == doctest::Approx(std::log(2.0) + std::log(4.0)));

  MixedFpProblem bad({RatioTerm(constant(1), constant(1), OuterFunction::identity(), Side::Max),
                      RatioTerm(constant(2), constant(1), OuterFunction::log1m(), Side::Min)},
                     unit_box(1));
  try {
    mixed_objective(bad, scalar(0.5));
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(e.term_index() == 1);
  }
}

TEST_CASE("RatioTerm rejects side / monotonicity mismatch") {
  CHECK_THROWS_AS(RatioTerm(constant(1), constant(1), OuterFunction::neg_identity(), Side::Max),
                  InvalidInput);
  CHECK_THROWS_AS(RatioTerm(constant(1), constant(1), OuterFunction::log1p(), Side::Min),
                  InvalidInput);
}

TEST_CASE("mixed_surrogate examples") {
  MixedFpProblem lin({RatioTerm(identity_fn(), constant(1), OuterFunction::identity(), Side::Max)},
                     unit_box(10));
  // y = opt_y(4, 1) = 2, so g = 2*2*sqrt(1) - 4*1 = 0.
  CHECK(mixed_surrogate(lin, scalar(1), scalar(4)) == doctest::Approx(0.0));
  CHECK(mixed_surrogate(lin, scalar(1), scalar(4)) ==
        doctest::Approx(quad_surrogate(1, 1, opt_y(4, 1))));
  CHECK(mixed_surrogate(lin, scalar(4), scalar(4)) == doctest::Approx(mixed_objective(lin, scalar(4))));

  MixedFpProblem mn({RatioTerm(identity_fn(), constant(1), OuterFunction::neg_identity(), Side::Min)},
                    unit_box(10));
  CHECK(mixed_surrogate(mn, scalar(4), scalar(1)) == -kInf);
  CHECK(mixed_surrogate(mn, scalar(1), scalar(1)) == doctest::Approx(-1.0));
}

TEST_CASE("NegHalfInverse at an infinite ratio is finite") {
  const auto f = OuterFunction::neg_half_inverse();
  CHECK(f.at_infinity() == 0.0);
  CHECK(OuterFunction::neg_identity().at_infinity() == -kInf);
  CHECK(OuterFunction::log1m().at_infinity() == -kInf);
}

TEST_CASE("surrogate sandwich on a two-term toy, checked on a dense grid") {
  // max: ln(1 + x^2 / (1 + x)); min: -(x + 1) / (3 - x)
  SmoothFn num_min = [](const Vector& x) { return ValueGrad{x[0] + 1.0, Vector::Ones(1)}; };
  SmoothFn den_min = [](const Vector& x) { return ValueGrad{3.0 - x[0], -Vector::Ones(1)}; };
  SmoothFn den_max = [](const Vector& x) { return ValueGrad{1.0 + x[0], Vector::Ones(1)}; };
  MixedFpProblem p({RatioTerm(square_fn(), den_max, OuterFunction::log1p(), Side::Max),
                    RatioTerm(num_min, den_min, OuterFunction::neg_identity(), Side::Min)},
                   unit_box(2));
  for (double a = 0.1; a <= 2.0; a += 0.3) {
    CHECK(mixed_surrogate(p, scalar(a), scalar(a)) == doctest::Approx(mixed_objective(p, scalar(a))));
    for (double x = 0.0; x <= 2.0; x += 0.01)
      CHECK(mixed_surrogate(p, scalar(x), scalar(a)) <= mixed_objective(p, scalar(x)) + 1e-9);
  }
}

TEST_CASE("objective gradient matches finite differences") {
  SmoothFn den_max = [](const Vector& x) { return ValueGrad{1.0 + x[0], Vector::Ones(1)}; };
  MixedFpProblem p({RatioTerm(square_fn(), den_max, OuterFunction::log1p(2.0), Side::Max)},
                   unit_box(3));
  for (double x = 0.2; x < 3.0; x += 0.4) {
    const double h = 1e-6 * (1 + x);
    const double fd =
        (mixed_objective(p, scalar(x + h)) - mixed_objective(p, scalar(x - h))) / (2 * h);
    CHECK(mixed_objective_gradient(p, scalar(x))[0] == doctest::Approx(fd).epsilon(1e-6));
  }
}
