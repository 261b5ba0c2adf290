#include <doctest.h>

#include <cmath>
#include <complex>

#include "fpkit/errors.hpp"
#include "fpkit/solver.hpp"

using namespace fpkit;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

FeasibleSet box1(double lo, double hi) { return FeasibleSet::box(vec({lo}), vec({hi})); }

SmoothFn constant(double c) {
  return [c](const Vector& x) { return ValueGrad{c, Vector::Zero(x.size())}; };
}

}  // namespace

TEST_CASE("project_box") {
  CHECK(project_box(vec({2, -1}), vec({0, 0}), vec({1, 1})) == vec({1, 0}));
  CHECK(project_box(vec({0.3, 0.7}), vec({0, 0}), vec({1, 1})) == vec({0.3, 0.7}));
  CHECK(project_box(vec({0, 0}), vec({0, 0}), vec({1, 1})) == vec({0, 0}));
  CHECK_THROWS_AS(project_box(vec({0}), vec({1}), vec({0})), InvalidInput);
}

TEST_CASE("project_ball") {
  using cd = std::complex<double>;
  ComplexVector v(2);
  v << 3.0, 4.0;
  CHECK(project_ball(v, 25.0) == v);
  const ComplexVector p = project_ball(v, 1.0);
  CHECK(std::abs(p[0] - cd(0.6)) < 1e-15);
  CHECK(std::abs(p[1] - cd(0.8)) < 1e-15);
  CHECK(project_ball(ComplexVector::Zero(3), 2.0).norm() == 0.0);
}

TEST_CASE("feasible sets are idempotent") {
  const FeasibleSet b = FeasibleSet::ball_product({2, 1}, {1.0, 4.0});
  const Vector x = vec({3, -1, 2, 0.5, 7, -7});
  const Vector p = b.project(x);
  CHECK((b.project(p) - p).norm() <= 1e-12);
  CHECK(b.contains(p));
  CHECK_FALSE(b.contains(x));
}

TEST_CASE("maximize_subproblem") {
  SolveOptions opts;
  SUBCASE("clipped quadratic") {
    ConcaveObjective f = [](const Vector& x) -> std::optional<ValueGrad> {
      return ValueGrad{-(x[0] - 3) * (x[0] - 3), vec({-2 * (x[0] - 3)})};
    };
    const auto r = maximize_subproblem(f, box1(0, 1), vec({0.5}), opts);
    CHECK(r.x[0] == doctest::Approx(1.0));
  }
  SUBCASE("ball projection optimum") {
    const Vector c = vec({3, 0, 0, 4});  // complex (3, 4i) as [Re; Im]
    ConcaveObjective f = [c](const Vector& x) -> std::optional<ValueGrad> {
      return ValueGrad{-(x - c).squaredNorm(), -2 * (x - c)};
    };
    const auto r = maximize_subproblem(f, FeasibleSet::ball_product({2}, {1.0}), Vector::Zero(4), opts);
    CHECK((r.x - c / 5.0).norm() < 1e-7);
  }
  SUBCASE("log objective: stationary point 1/(1+p) = 0.5") {
    ConcaveObjective f = [](const Vector& x) -> std::optional<ValueGrad> {
      if (x[0] <= -1) return std::nullopt;
      return ValueGrad{std::log1p(x[0]) - 0.5 * x[0], vec({1 / (1 + x[0]) - 0.5})};
    };
    const auto r = maximize_subproblem(f, box1(0, 10), vec({5}), opts);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.converged);
  }
  SUBCASE("start outside the domain is rejected") {
    ConcaveObjective f = [](const Vector&) -> std::optional<ValueGrad> { return std::nullopt; };
    CHECK_THROWS_AS(maximize_subproblem(f, box1(0, 1), vec({0.5}), opts), InvalidInput);
  }
}

TEST_CASE("SolveOptions validation names the field") {
  SolveOptions o;
  o.backtrack_factor = 1.5;
  CHECK_THROWS_WITH_AS(o.validate(), doctest::Contains("backtrack_factor"), InvalidInput);
}

TEST_CASE("run_mm on single-ratio problems") {
  SolveOptions opts;
  SUBCASE("max ratio A = x, B = 1") {
    SmoothFn A = [](const Vector& x) { return ValueGrad{x[0], vec({1})}; };
    MixedFpProblem p({RatioTerm(A, constant(1), OuterFunction::identity(), Side::Max)}, box1(0, 1));
    const auto r = run_mm(p, vec({0.2}), opts);
    CHECK(r.x[0] == doctest::Approx(1.0));
    CHECK(r.trace.final_objective() == doctest::Approx(1.0));
    CHECK(r.trace.outer_iterations() <= 3);
  }
  SUBCASE("min ratio A = (x-2)^2 + 1, B = 1") {
    SmoothFn A = [](const Vector& x) {
      return ValueGrad{(x[0] - 2) * (x[0] - 2) + 1, vec({2 * (x[0] - 2)})};
    };
    MixedFpProblem p({RatioTerm(A, constant(1), OuterFunction::neg_identity(), Side::Min)}, box1(0, 5));
    const auto r = run_mm(p, vec({4.5}), opts);
    CHECK(r.x[0] == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(r.trace.nondecreasing());
  }
}

TEST_CASE("run_mm matches a dense grid oracle on a two-term mixed toy") {
  // max: ln(1 + (x0 + 2 x1) / (1 + 0.5 x1 + 0.2 x0)), min: -(x0^2 + x1^2 + 0.5) / (2 - 0.3 x0)
  SmoothFn A1 = [](const Vector& x) { return ValueGrad{x[0] + 2 * x[1], vec({1, 2})}; };
  SmoothFn B1 = [](const Vector& x) { return ValueGrad{1 + 0.2 * x[0] + 0.5 * x[1], vec({0.2, 0.5})}; };
  SmoothFn A2 = [](const Vector& x) {
    return ValueGrad{x[0] * x[0] + x[1] * x[1] + 0.5, vec({2 * x[0], 2 * x[1]})};
  };
  SmoothFn B2 = [](const Vector& x) { return ValueGrad{2 - 0.3 * x[0], vec({-0.3, 0})}; };
  MixedFpProblem p({RatioTerm(A1, B1, OuterFunction::log1p(), Side::Max),
                    RatioTerm(A2, B2, OuterFunction::neg_identity(), Side::Min)},
                   FeasibleSet::box(vec({0, 0}), vec({2, 2})));

  double best = -1e300;
  const int n = 800;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      best = std::max(best, mixed_objective(p, vec({2.0 * i / n, 2.0 * j / n})));

  SolveOptions opts;
  opts.outer_tol = 1e-12;
  const Vector x0 = vec({1.5, 1.5});
  const auto r = run_mm(p, x0, opts);
  CHECK(r.trace.final_objective() >= mixed_objective(p, x0));
  CHECK(r.trace.final_objective() == doctest::Approx(best).epsilon(1e-4));
  CHECK(r.trace.final_objective() >= best - 1e-9);  // grid can only be lower
  CHECK(r.trace.nondecreasing());
}

TEST_CASE("stationarity_residual") {
  SmoothFn A = [](const Vector& x) {
    return ValueGrad{(x[0] - 2) * (x[0] - 2) + 1, vec({2 * (x[0] - 2)})};
  };
  MixedFpProblem interior({RatioTerm(A, constant(1), OuterFunction::neg_identity(), Side::Min)},
                          box1(0, 5));
  CHECK(stationarity_residual(interior, vec({2.0})) <= 1e-6);
  MixedFpProblem boundary({RatioTerm(A, constant(1), OuterFunction::neg_identity(), Side::Min)},
                          box1(3, 5));
  CHECK(stationarity_residual(boundary, vec({3.0})) <= 1e-6);
  CHECK(stationarity_residual(interior, vec({4.0})) > 0.01);
}

TEST_CASE("finite_difference_gradient") {
  const auto g = finite_difference_gradient(
      [](const Vector& x) { return std::sin(x[0]) * x[1]; }, vec({0.3, 2.0}));
  CHECK(g[0] == doctest::Approx(std::cos(0.3) * 2.0).epsilon(1e-8));
  CHECK(g[1] == doctest::Approx(std::sin(0.3)).epsilon(1e-8));
}

namespace {

// A deliberately broken MM problem: the "surrogate" pulls x toward a point of
// lower true objective, so the monotonicity guard must fire.
class BrokenMm final : public MmProblem {
 public:
  BrokenMm() : set_(box1(0, 1)) {}
  const FeasibleSet& feasible() const override { return set_; }
  double objective(const Vector& x) const override { return x[0]; }
  ConcaveObjective surrogate_at(const Vector&) const override {
    return [](const Vector& x) -> std::optional<ValueGrad> {
      return ValueGrad{-x[0] * x[0], vec({-2 * x[0]})};
    };
  }

 private:
  FeasibleSet set_;
};

}  // namespace

TEST_CASE("run_mm raises on a monotonicity violation") {
  CHECK_THROWS_AS(run_mm(BrokenMm{}, vec({0.8}), SolveOptions{}), InvariantViolation);
}

TEST_CASE("trace helpers") {
  IterationTrace t;
  t.records = {{0, 1.0, 0, 0}, {1, 2.0, 0, 3}, {2, 2.0 - 1e-12, 0, 1}};
  CHECK(t.nondecreasing());
  CHECK_FALSE(t.nonincreasing());
  CHECK(t.negated().nonincreasing());
  CHECK(t.outer_iterations() == 2);
  t.records.push_back({3, 1.5, 0, 1});
  CHECK_FALSE(t.nondecreasing());
}
