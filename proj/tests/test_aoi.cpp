#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fpkit/aoi.hpp"
#include "fpkit/errors.hpp"

using namespace fpkit;
using namespace fpkit::aoi;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

}  // namespace

TEST_CASE("avg_aoi") {
  CHECK(avg_aoi(0, vec({1, 0.3}), 1.0) == doctest::Approx(2.0));
  CHECK(avg_aoi(0, vec({0.5}), 1.0) == doctest::Approx(3.0));
  CHECK(avg_aoi(1, vec({1, 1}), 1.0) == doctest::Approx(6.5));
  CHECK(avg_aoi(0, vec({0.0}), 1.0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("avg_aoi_decomposed") {
  auto [a, b] = avg_aoi_decomposed(0, vec({1}), 1.0);
  CHECK(a == doctest::Approx(1.0));
  CHECK(b == doctest::Approx(1.0));
  std::tie(a, b) = avg_aoi_decomposed(1, vec({1, 1}), 1.0);
  CHECK(a == doctest::Approx(2.5));
  CHECK(b == doctest::Approx(4.0));

  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double mu = u(gen);
    Vector l(4);
    for (auto& v : l) v = u(gen) * mu / 2;
    for (int k = 0; k < 4; ++k) {
      const auto [p, q] = avg_aoi_decomposed(k, l, mu);
      CHECK(p + q == doctest::Approx(avg_aoi(k, l, mu)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sum-AoI depends on source order") {
  CHECK(sum_aoi(vec({0.2, 0.9}), 1.0) != doctest::Approx(sum_aoi(vec({0.9, 0.2}), 1.0)));
}

TEST_CASE("build_problem") {
  CHECK(build_problem({1, 1.0}).terms().size() == 2);
  const MixedFpProblem p = build_problem({2, 1.0});
  CHECK(p.min_side_count() == 4);
  CHECK(mixed_objective(p, vec({1, 1})) == doctest::Approx(-8.5));

  const Vector x = vec({0.3, 0.6});
  const Vector g = mixed_objective_gradient(p, x);
  const Vector fd = finite_difference_gradient([&](const Vector& v) { return mixed_objective(p, v); }, x);
  CHECK((g - fd).norm() <= 1e-6 * g.norm());
}

TEST_CASE("run_algorithm1") {
  SolveOptions opts;
  const auto one = run_algorithm1({1, 1.0}, opts);
  CHECK(one.solution.lambda[0] == doctest::Approx(1.0));
  CHECK(one.solution.sum_aoi == doctest::Approx(2.0));

  const Scenario k3{3, 1.0};
  const auto r = run_algorithm1(k3, opts);
  CHECK(r.trace.nonincreasing());
  CHECK(r.trace.final_objective() == doctest::Approx(r.solution.sum_aoi));
  CHECK(r.trace.records.front().objective == doctest::Approx(sum_aoi(Vector::Constant(3, 1.0 / 3), 1.0)));
  const Solution oracle = oracle_grid(k3);
  CHECK(std::abs(r.solution.sum_aoi - oracle.sum_aoi) <= 1e-3 * oracle.sum_aoi);
}

TEST_CASE("baselines") {
  const Solution e1 = baseline_equal_rate({1, 1.0});
  CHECK(e1.lambda[0] == doctest::Approx(1.0));
  CHECK(e1.sum_aoi == doctest::Approx(2.0));
  CHECK(baseline_max_rate({1, 1.0}).sum_aoi == doctest::Approx(2.0));
  CHECK(baseline_max_rate({2, 1.0}).sum_aoi == doctest::Approx(8.5));

  // 1-D scan oracle with step 1e-4 for the equal-rate optimum.
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 10000; ++i) best = std::min(best, sum_aoi(Vector::Constant(2, i * 1e-4), 1.0));
  const Solution e2 = baseline_equal_rate({2, 1.0});
  CHECK(e2.sum_aoi <= best + 1e-9);
  CHECK(e2.sum_aoi == doctest::Approx(best).epsilon(1e-6));
  CHECK(run_algorithm1({2, 1.0}, SolveOptions{}).solution.sum_aoi <= e2.sum_aoi + 1e-9);
}

TEST_CASE("oracle_grid") {
  const Solution o1 = oracle_grid({1, 1.0});
  CHECK(o1.lambda[0] == doctest::Approx(1.0));
  const Solution a = oracle_grid({2, 1.0}, 0.02, 2);
  const Solution b = oracle_grid({2, 1.0}, 0.02, 4);
  CHECK(b.sum_aoi <= a.sum_aoi);
  CHECK(b.sum_aoi == doctest::Approx(a.sum_aoi).epsilon(1e-4));
  CHECK_THROWS_AS(oracle_grid({4, 1.0}), InvalidInput);
}

TEST_CASE("scenario validation") {
  CHECK_THROWS_AS(Scenario({0, 1.0}).validate(), InvalidInput);
  CHECK_THROWS_AS(Scenario({2, 0.0}).validate(), InvalidInput);
}
