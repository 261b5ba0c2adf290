#include "fpkit/verify.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <utility>

#include "fpkit/aoi.hpp"
#include "fpkit/errors.hpp"
#include "fpkit/fp_core.hpp"
#include "fpkit/fp_matrix.hpp"
#include "fpkit/lagrangian_dual.hpp"
#include "fpkit/radar.hpp"
#include "fpkit/secure.hpp"
#include "fpkit/solver.hpp"

namespace fpkit::verify {

namespace {

using cd = std::complex<double>;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  cd complex_normal() { return {normal(), normal()}; }
  std::uint64_t next() { return gen_(); }

  Vector uniform_vector(Eigen::Index n, double lo, double hi) {
    Vector v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }
  ComplexMatrix complex_matrix(Eigen::Index r, Eigen::Index c) {
    ComplexMatrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = complex_normal();
    return m;
  }
  ComplexMatrix pd_matrix(Eigen::Index d) {
    const ComplexMatrix G = complex_matrix(d, d);
    return hermitian_part(G * G.adjoint() + 0.1 * ComplexMatrix::Identity(d, d));
  }

 private:
  std::mt19937_64 gen_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string fmt(const Vector& v) {
  std::ostringstream s;
  s.precision(17);
  s << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v[i];
  s << "]";
  return s.str();
}

std::string fmt(const ComplexMatrix& m) {
  std::ostringstream s;
  s.precision(17);
  s << "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s << (i ? "; " : "");
    for (Eigen::Index j = 0; j < m.cols(); ++j) s << (j ? " " : "") << m(i, j);
  }
  s << "]";
  return s.str();
}

class Property {
 public:
  Property(std::string suite, std::string name) {
    result_.suite = std::move(suite);
    result_.name = std::move(name);
  }

  template <typename Describe>
  void check(bool ok, Describe&& describe) {
    ++result_.cases;
    if (!ok && result_.failures++ == 0) result_.counterexample = describe();
  }

  // Runs one case; an exception escaping it counts as a failure.
  template <typename Body>
  void guard(Body&& body, const std::string& inputs) {
    try {
      body();
    } catch (const std::exception& e) {
      check(false, [&] { return inputs + " threw: " + e.what(); });
    }
  }

  PropertyResult result() const { return result_; }

 private:
  PropertyResult result_;
};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

bool gradient_close(const Vector& g, const Vector& fd, double rel = 1e-5) {
  return (g - fd).norm() <= rel * (fd.norm() + 1e-8);
}

// ---------------------------------------------------------------------------
// Random polynomial mixed FP problems on the box [0.1, 2]^n. Max-side terms
// have sqrt(A) affine and B affine; min-side terms have A convex quadratic
// and sqrt(B) affine, so every surrogate is concave.

struct RandomProblem {
  MixedFpProblem problem;
  std::string description;
};

RandomProblem random_problem(Rng& rng) {
  const int n = rng.integer(1, 3);
  const int terms_count = rng.integer(1, 6);
  std::vector<RatioTerm> terms;
  std::ostringstream desc;
  desc.precision(6);
  desc << "n=" << n << " terms:";
  for (int t = 0; t < terms_count; ++t) {
    const int kind = rng.integer(0, 4);
    const double w = rng.uniform(0.1, 2.0);
    const double c0 = rng.uniform(0.1, 1.0);
    const Vector c = rng.uniform_vector(n, 0.0, 1.0);
    double d0 = rng.uniform(0.1, 1.0);
    const Vector d = rng.uniform_vector(n, 0.0, 1.0);
    if (kind <= 2) {
      SmoothFn num = [c0, c](const Vector& x) {
        const double s = c0 + c.dot(x);
        return ValueGrad{s * s, 2.0 * s * c};
      };
      SmoothFn den = [d0, d](const Vector& x) { return ValueGrad{d0 + d.dot(x), d}; };
      OuterFunction outer = kind == 0   ? OuterFunction::identity(w)
                            : kind == 1 ? OuterFunction::log1p(w)
                                        : OuterFunction::neg_half_inverse();
      terms.emplace_back(std::move(num), std::move(den), outer, Side::Max);
    } else {
      // A <= c0 + 4 |c|_1 on the box; d0 above its square root keeps A / B < 1.
      d0 += std::sqrt(c0 + 4.0 * c.sum());
      SmoothFn num = [c0, c](const Vector& x) {
        return ValueGrad{c0 + c.dot(x.cwiseProduct(x)), 2.0 * c.cwiseProduct(x)};
      };
      SmoothFn den = [d0, d](const Vector& x) {
        const double s = d0 + d.dot(x);
        return ValueGrad{s * s, 2.0 * s * d};
      };
      OuterFunction outer = kind == 3 ? OuterFunction::neg_identity(w) : OuterFunction::log1m(w);
      terms.emplace_back(std::move(num), std::move(den), outer, Side::Min);
    }
    desc << " (kind " << kind << ", w " << w << ", c0 " << c0 << ", d0 " << d0 << ")";
  }
  FeasibleSet box = FeasibleSet::box(Vector::Constant(n, 0.1), Vector::Constant(n, 2.0));
  return {MixedFpProblem(std::move(terms), std::move(box)), desc.str()};
}

Vector random_point(Rng& rng, std::size_t n) {
  return rng.uniform_vector(static_cast<Eigen::Index>(n), 0.1, 2.0);
}

// ---------------------------------------------------------------------------
// core

void core_suite(std::uint64_t seed, std::vector<PropertyResult>& out) {
  Rng rng(seed);
  const std::string suite = "core";

  {
    Property p(suite, "quadratic transform lower-bounds A/B, gap B (y - y*)^2");
    for (int i = 0; i < 1000; ++i) {
      const double A = rng.uniform(0.0, 10.0);
      const double B = 10.0 - rng.uniform(0.0, 10.0);
      const double y = rng.uniform(-5.0, 5.0);
      const double r = A / B;
      const double q = quad_surrogate(A, B, y);
      const double ys = opt_y(A, B);
      const double gap = B * (y - ys) * (y - ys);
      const bool ok = q <= r + 1e-12 * (1.0 + r) && close(quad_surrogate(A, B, ys), r, 1e-12) &&
                      std::abs((r - q) - gap) <= 1e-9 * (1.0 + r + gap);
      p.check(ok, [&] { return "A=" + fmt(A) + " B=" + fmt(B) + " y=" + fmt(y); });
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "inverse quadratic transform upper-bounds A/B, tight at sqrt(B)/A");
    for (int i = 0; i < 1000; ++i) {
      const double A = 10.0 - rng.uniform(0.0, 10.0);
      const double B = 10.0 - rng.uniform(0.0, 10.0);
      const double r = A / B;
      const double yt = rng.uniform(0.0, 3.0 * std::sqrt(B) / A);
      const ExtendedReal v = inv_quad_surrogate(A, B, yt);
      const ExtendedReal tight = inv_quad_surrogate(A, B, std::sqrt(B) / A);
      const bool ok = (v.is_infinite() || v.value() >= r - 1e-12 * (1.0 + r)) &&
                      !tight.is_infinite() && close(tight.value(), r, 1e-12);
      p.check(ok, [&] { return "A=" + fmt(A) + " B=" + fmt(B) + " y~=" + fmt(yt); });
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "mixed surrogate is a tight minorizer");
    for (int i = 0; i < 200; ++i) {
      const RandomProblem rp = random_problem(rng);
      for (int j = 0; j < 5; ++j) {
        const Vector anchor = random_point(rng, rp.problem.dimension());
        const Vector x = random_point(rng, rp.problem.dimension());
        p.guard(
            [&] {
              const double f = mixed_objective(rp.problem, x);
              const double g = mixed_surrogate(rp.problem, x, anchor);
              const double fa = mixed_objective(rp.problem, anchor);
              const double ga = mixed_surrogate(rp.problem, anchor, anchor);
              const bool ok = g <= f + 1e-9 * (1.0 + std::abs(f)) && std::abs(ga - fa) <= 1e-9;
              p.check(ok, [&] {
                return rp.description + " x=" + fmt(x) + " anchor=" + fmt(anchor) + " f=" + fmt(f) +
                       " g=" + fmt(g);
              });
            },
            rp.description);
      }
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "arithmetic-harmonic witness: sum A/B >= N^2 / sum B/A, equal iff ratios equal");
    for (int i = 0; i < 1000; ++i) {
      const double A1 = rng.uniform(0.1, 10.0);
      const double B1 = rng.uniform(0.1, 10.0);
      const double B2 = rng.uniform(0.1, 10.0);
      const bool equal_case = i % 4 == 0;
      const double A2 = equal_case ? B2 * (A1 / B1) : rng.uniform(0.1, 10.0);
      const double lhs = A1 / B1 + A2 / B2;
      const double rhs = 4.0 / (B1 / A1 + B2 / A2);
      const double spread = std::abs(A1 / B1 - A2 / B2) / (A1 / B1);
      bool ok = lhs >= rhs * (1.0 - 1e-12);
      if (equal_case) ok = ok && std::abs(lhs - rhs) <= 1e-12 * lhs;
      if (spread > 1e-3) ok = ok && lhs > rhs;
      p.check(ok, [&] {
        return "A=(" + fmt(A1) + ", " + fmt(A2) + ") B=(" + fmt(B1) + ", " + fmt(B2) + ")";
      });
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "analytic gradients match central finite differences (rel 1e-5)");
    for (int i = 0; i < 200; ++i) {
      const RandomProblem rp = random_problem(rng);
      const Vector anchor = random_point(rng, rp.problem.dimension());
      const Vector x = anchor + 0.01 * rng.uniform_vector(anchor.size(), -1.0, 1.0);
      p.guard(
          [&] {
            bool ok = true;
            for (const auto& t : rp.problem.terms()) {
              const auto num = [&](const Vector& v) { return t.numerator(v).value; };
              const auto den = [&](const Vector& v) { return t.denominator(v).value; };
              ok = ok && gradient_close(t.numerator(x).gradient, finite_difference_gradient(num, x));
              ok = ok && gradient_close(t.denominator(x).gradient, finite_difference_gradient(den, x));
            }
            const auto f = [&](const Vector& v) { return mixed_objective(rp.problem, v); };
            ok = ok && gradient_close(mixed_objective_gradient(rp.problem, x),
                                      finite_difference_gradient(f, x));
            const AuxState aux = compute_aux(rp.problem, anchor);
            const auto g = surrogate_value_grad(rp.problem, x, aux);
            if (g) {
              const auto gs = [&](const Vector& v) { return surrogate_value(rp.problem, v, aux); };
              ok = ok && gradient_close(g->gradient, finite_difference_gradient(gs, x));
            }
            p.check(ok, [&] { return rp.description + " x=" + fmt(x) + " anchor=" + fmt(anchor); });
          },
          rp.description);
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "surrogate at the incoming point equals the objective; subproblem never decreases it");
    for (int i = 0; i < 100; ++i) {
      const RandomProblem rp = random_problem(rng);
      const Vector x = random_point(rng, rp.problem.dimension());
      p.guard(
          [&] {
            const MixedFpMm mm(rp.problem);
            const ConcaveObjective g = mm.surrogate_at(x);
            const auto gx = g(x);
            const double f = mm.objective(x);
            const SubproblemResult sub = maximize_subproblem(g, mm.feasible(), x, SolveOptions{});
            const bool ok = gx && std::abs(gx->value - f) <= 1e-9 * (1.0 + std::abs(f)) &&
                            sub.value >= gx->value && mm.feasible().contains(sub.x) &&
                            mm.feasible().in_domain(sub.x);
            p.check(ok, [&] { return rp.description + " x=" + fmt(x); });
          },
          rp.description);
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "MM on random mixed problems is monotone");
    for (int i = 0; i < 20; ++i) {
      const RandomProblem rp = random_problem(rng);
      const Vector x0 = random_point(rng, rp.problem.dimension());
      p.guard(
          [&] {
            SolveOptions opts;
            opts.max_outer = 100;
            const MmResult res = run_mm(rp.problem, x0, opts);
            p.check(res.trace.nondecreasing(), [&] { return rp.description + " x0=" + fmt(x0); });
          },
          rp.description + " x0=" + fmt(x0));
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "projections are idempotent and land in the set");
    for (int i = 0; i < 500; ++i) {
      const int n = rng.integer(1, 4);
      const Vector lo = rng.uniform_vector(n, -1.0, 0.0);
      const Vector hi = lo + rng.uniform_vector(n, 0.0, 2.0);
      const FeasibleSet box = FeasibleSet::box(lo, hi);
      const Vector x = rng.uniform_vector(n, -3.0, 3.0);
      const Vector px = box.project(x);
      bool ok = box.contains(px) && box.project(px) == px;

      std::vector<std::size_t> sizes;
      std::vector<double> radii;
      std::size_t total = 0;
      for (int b = 0; b < n; ++b) {
        sizes.push_back(static_cast<std::size_t>(rng.integer(1, 3)));
        radii.push_back(rng.uniform(0.1, 4.0));
        total += 2 * sizes.back();
      }
      const FeasibleSet balls = FeasibleSet::ball_product(sizes, radii);
      const Vector z = rng.uniform_vector(static_cast<Eigen::Index>(total), -3.0, 3.0);
      const Vector pz = balls.project(z);
      ok = ok && balls.contains(pz) && (balls.project(pz) - pz).norm() <= 1e-15 * (1.0 + pz.norm());
      p.check(ok, [&] { return "box x=" + fmt(x) + " ball z=" + fmt(z); });
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "accepted iterates stay inside the open domain");
    for (int i = 0; i < 100; ++i) {
      const int n = rng.integer(1, 4);
      const double floor = rng.uniform(0.2, 0.8);
      const Vector target = rng.uniform_vector(n, -1.0, 2.0);
      const FeasibleSet set = FeasibleSet::box(Vector::Zero(n), Vector::Constant(n, 2.0))
                                  .with_domain([floor](const Vector& x) { return x.minCoeff() > floor; });
      // Concave objective pulled toward a target that may lie outside the domain.
      ConcaveObjective obj = [&](const Vector& x) -> std::optional<ValueGrad> {
        if (x.minCoeff() <= floor) return std::nullopt;
        const Eigen::ArrayXd slack = x.array() - floor;
        return ValueGrad{-(x - target).squaredNorm() + 1e-3 * slack.log().sum(),
                         -2.0 * (x - target) + (1e-3 / slack).matrix()};
      };
      const Vector x0 = Vector::Constant(n, 1.5);
      p.guard(
          [&] {
            const SubproblemResult r = maximize_subproblem(obj, set, x0, SolveOptions{});
            p.check(set.in_domain(r.x) && set.contains(r.x) && std::isfinite(r.value),
                    [&] { return "floor=" + fmt(floor) + " target=" + fmt(target); });
          },
          "floor=" + fmt(floor) + " target=" + fmt(target));
    }
    out.push_back(p.result());
  }
}

// ---------------------------------------------------------------------------
// matrix

void matrix_suite(std::uint64_t seed, std::vector<PropertyResult>& out) {
  Rng rng(seed + 1);
  const std::string suite = "matrix";

  {
    Property p(suite, "Q+ and Q- are PSD-order bounds of their matrix ratios");
    for (int i = 0; i < 500; ++i) {
      const int d = rng.integer(1, 3);
      const int ell = rng.integer(1, d);
      const ComplexMatrix As = rng.complex_matrix(d, ell);
      const ComplexMatrix B = rng.pd_matrix(d);
      const ComplexMatrix Y = rng.complex_matrix(d, ell);
      const ComplexMatrix R = matrix_ratio(As, B);
      const double gap_plus = min_eigenvalue(R - q_plus(As, B, Y));

      const ComplexMatrix Bs = rng.complex_matrix(d, ell);
      const ComplexMatrix A = rng.pd_matrix(d);
      const ComplexMatrix Yt = rng.complex_matrix(d, ell);
      const ComplexMatrix Rm = matrix_ratio(Bs, A);
      const double gap_minus = min_eigenvalue(Rm - q_minus(Bs, A, Yt));
      const bool ok = gap_plus >= -1e-10 * (1.0 + R.norm()) && gap_minus >= -1e-10 * (1.0 + Rm.norm());
      p.check(ok, [&] {
        return "sqrtA=" + fmt(As) + " B=" + fmt(B) + " Y=" + fmt(Y) + " gap+=" + fmt(gap_plus) +
               " gap-=" + fmt(gap_minus);
      });
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "Q+ and Q- are tight at the optimal auxiliaries");
    for (int i = 0; i < 500; ++i) {
      const int d = rng.integer(1, 3);
      const int ell = rng.integer(1, d);
      const ComplexMatrix As = rng.complex_matrix(d, ell);
      const ComplexMatrix B = rng.pd_matrix(d);
      const ComplexMatrix R = matrix_ratio(As, B);
      const double err_plus = (q_plus(As, B, opt_Y(As, B)) - R).norm();
      const ComplexMatrix A = rng.pd_matrix(d);
      const ComplexMatrix Rm = matrix_ratio(As, A);
      const double err_minus = (q_minus(As, A, opt_Y_tilde(As, A)) - Rm).norm();
      const bool ok = err_plus <= 1e-10 * R.norm() && err_minus <= 1e-10 * Rm.norm();
      p.check(ok, [&] { return "sqrt=" + fmt(As) + " B=" + fmt(B) + " A=" + fmt(A); });
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "cyclic property of trace and log det(I + .)");
    const MatrixOuterKind kinds[] = {MatrixOuterKind::Trace, MatrixOuterKind::LogDetIPlus,
                                     MatrixOuterKind::NegTrace, MatrixOuterKind::NegLogDetIPlus};
    for (int i = 0; i < 200; ++i) {
      const int d = rng.integer(1, 3);
      const ComplexMatrix As = psd_sqrt(rng.pd_matrix(d), d);
      const ComplexMatrix Bs = psd_sqrt(rng.pd_matrix(d), d);
      for (auto kind : kinds) {
        p.check(cyclic_check(kind, As, Bs), [&] {
          return "kind=" + std::to_string(static_cast<int>(kind)) + " sqrtA=" + fmt(As) +
                 " sqrtB=" + fmt(Bs);
        });
      }
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "1 x 1 matrix operations reduce to the scalar transforms");
    for (int i = 0; i < 500; ++i) {
      const double A = rng.uniform(0.1, 10.0);
      const double B = rng.uniform(0.1, 10.0);
      const double y = rng.uniform(-3.0, 3.0);
      const double yt = rng.uniform(0.0, std::sqrt(B) / A);
      const ComplexMatrix As = ComplexMatrix::Constant(1, 1, std::sqrt(A));
      const ComplexMatrix Bs = ComplexMatrix::Constant(1, 1, std::sqrt(B));
      const ComplexMatrix Am = ComplexMatrix::Constant(1, 1, A);
      const ComplexMatrix Bm = ComplexMatrix::Constant(1, 1, B);
      const ComplexMatrix Ym = ComplexMatrix::Constant(1, 1, y);
      const ComplexMatrix Ytm = ComplexMatrix::Constant(1, 1, yt);
      const double r = A / B;
      bool ok = close(matrix_ratio(As, Bm)(0, 0).real(), r, 1e-12);
      ok = ok && close(q_plus(As, Bm, Ym)(0, 0).real(), quad_surrogate(A, B, y), 1e-12);
      ok = ok && close(opt_Y(As, Bm)(0, 0).real(), opt_y(A, B), 1e-12);
      ok = ok && close(opt_Y_tilde(Bs, Am)(0, 0).real(), opt_y_tilde(A, B, 1e-300), 1e-12);
      const ExtendedReal inv = inv_quad_surrogate(A, B, yt);
      const double qm = q_minus(Bs, Am, Ytm)(0, 0).real();
      ok = ok && (qm > 0.0 ? !inv.is_infinite() && close(1.0 / qm, inv.value(), 1e-12) : inv.is_infinite());
      ok = ok && close(std::norm(psd_sqrt(Am, 1)(0, 0)), A, 1e-12);
      const MatrixOuter ld{MatrixOuterKind::LogDetIPlus, 1.0};
      ok = ok && close(ld.evaluate(ComplexMatrix::Constant(1, 1, r)), std::log1p(r), 1e-12);
      const MatrixOuter tr{MatrixOuterKind::NegTrace, 1.0};
      ok = ok && close(tr.evaluate(ComplexMatrix::Constant(1, 1, r)), -r, 1e-12);
      p.check(ok, [&] { return "A=" + fmt(A) + " B=" + fmt(B) + " y=" + fmt(y) + " y~=" + fmt(yt); });
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "matrix surrogate is a tight minorizer");
    const MatrixOuterKind kinds[] = {MatrixOuterKind::Trace, MatrixOuterKind::LogDetIPlus,
                                     MatrixOuterKind::NegTrace, MatrixOuterKind::NegLogDetIPlus};
    for (int i = 0; i < 100; ++i) {
      const int n = rng.integer(1, 3);
      const int d = rng.integer(1, 3);
      std::vector<MatrixRatioTerm> terms;
      for (int t = rng.integer(1, 3); t > 0; --t) {
        std::vector<ComplexMatrix> Ai;
        std::vector<ComplexMatrix> Bi;
        for (int k = 0; k <= n; ++k) {
          Ai.push_back(rng.pd_matrix(d));
          Bi.push_back(rng.pd_matrix(d));
        }
        auto affine = [n](std::vector<ComplexMatrix> M) {
          return [n, M = std::move(M)](const Vector& x) {
            ComplexMatrix S = M[0];
            for (int k = 0; k < n; ++k) S += x[k] * M[static_cast<std::size_t>(k) + 1];
            return S;
          };
        };
        MatrixRatioTerm term{affine(Ai), affine(Bi),
                             MatrixOuter{kinds[rng.integer(0, 3)], rng.uniform(0.1, 2.0)}};
        terms.push_back(std::move(term));
      }
      const Vector anchor = rng.uniform_vector(n, 0.0, 2.0);
      const Vector x = rng.uniform_vector(n, 0.0, 2.0);
      p.guard(
          [&] {
            const double f = matrix_mixed_objective(terms, x);
            const auto g = matrix_mixed_surrogate(terms, x, anchor);
            const auto ga = matrix_mixed_surrogate(terms, anchor, anchor);
            const double fa = matrix_mixed_objective(terms, anchor);
            const bool ok = (!g || *g <= f + 1e-9 * (1.0 + std::abs(f))) && ga &&
                            std::abs(*ga - fa) <= 1e-9 * (1.0 + std::abs(fa));
            p.check(ok, [&] { return "x=" + fmt(x) + " anchor=" + fmt(anchor); });
          },
          "x=" + fmt(x) + " anchor=" + fmt(anchor));
    }
    out.push_back(p.result());
  }
}

// ---------------------------------------------------------------------------
// lagrangian

std::vector<LogRatioTerm> random_log_terms(Rng& rng, int n, std::string& desc) {
  std::vector<LogRatioTerm> terms;
  std::ostringstream s;
  s.precision(6);
  for (int t = rng.integer(1, 4); t > 0; --t) {
    const double c0 = rng.uniform(0.0, 1.0);
    const Vector c = rng.uniform_vector(n, 0.0, 1.0);
    const double d0 = rng.uniform(0.1, 1.0);
    const Vector d = rng.uniform_vector(n, 0.0, 1.0);
    LogRatioTerm term;
    term.numerator = [c0, c](const Vector& x) { return ValueGrad{c0 + c.dot(x), c}; };
    term.denominator = [d0, d](const Vector& x) {
      return ValueGrad{d0 + d.dot(x.cwiseProduct(x)), 2.0 * d.cwiseProduct(x)};
    };
    term.weight = rng.uniform(0.0, 2.0);
    term.side = rng.integer(0, 1) == 0 ? Side::Max : Side::Min;
    s << " (w " << term.weight << (term.side == Side::Max ? " max" : " min") << ", c0 " << c0
      << ", d0 " << d0 << ")";
    terms.push_back(std::move(term));
  }
  desc = s.str();
  return terms;
}

void lagrangian_suite(std::uint64_t seed, std::vector<PropertyResult>& out) {
  Rng rng(seed + 2);
  const std::string suite = "lagrangian";

  {
    Property p(suite, "zeta+ and zeta- are stationary in gamma at the closed forms");
    for (int i = 0; i < 1000; ++i) {
      const double w = rng.uniform(0.1, 3.0);
      const double A = rng.uniform(0.0, 10.0);
      const double B = rng.uniform(0.5, 10.0);
      const double g = opt_gamma(A, B);
      const double hp = 1e-5 * (1.0 + g);
      const double dplus = (zeta_plus(w, g + hp, A, B) - zeta_plus(w, g - hp, A, B)) / (2.0 * hp);
      const double gt = opt_gamma_tilde(A, B);
      const double hm = 1e-5 * (1.0 - gt);
      const double dminus =
          (zeta_minus(w, gt + hm, A, B) - zeta_minus(w, std::max(gt - hm, -1.0), A, B)) / (2.0 * hm);
      p.check(std::abs(dplus) <= 1e-8 && std::abs(dminus) <= 1e-8, [&] {
        return "w=" + fmt(w) + " A=" + fmt(A) + " B=" + fmt(B) + " d+=" + fmt(dplus) +
               " d-=" + fmt(dminus);
      });
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "maximizing zeta over gamma recovers +-w ln(1 + A/B)");
    for (int i = 0; i < 1000; ++i) {
      const double w = rng.uniform(0.1, 3.0);
      const double A = rng.uniform(0.0, 10.0);
      const double B = rng.uniform(0.1, 10.0);
      const double target = w * std::log1p(A / B);
      const double zp = zeta_plus(w, opt_gamma(A, B), A, B);
      const double zm = zeta_minus(w, opt_gamma_tilde(A, B), A, B);
      const double g = rng.uniform(0.0, 20.0);
      const double gt = rng.uniform(0.0, 0.999);
      const bool ok = close(zp, target, 1e-12) && close(zm, -target, 1e-12) &&
                      zeta_plus(w, g, A, B) <= zp + 1e-12 * (1.0 + target) &&
                      zeta_minus(w, gt, A, B) <= zm + 1e-12 * (1.0 + target);
      p.check(ok, [&] { return "w=" + fmt(w) + " A=" + fmt(A) + " B=" + fmt(B); });
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "log-ratio surrogate lower-bounds the objective and is tight at the anchor");
    for (int i = 0; i < 300; ++i) {
      const int n = rng.integer(1, 3);
      std::string desc;
      const auto terms = random_log_terms(rng, n, desc);
      const Vector x = rng.uniform_vector(n, 0.0, 2.0);
      const Vector anchor = rng.uniform_vector(n, 0.0, 2.0);
      p.guard(
          [&] {
            const double f = log_ratio_objective(terms, x);
            const double g = log_ratio_surrogate(terms, x, anchor);
            const double fa = log_ratio_objective(terms, anchor);
            const double ga = log_ratio_surrogate(terms, anchor, anchor);
            const bool ok = g - f <= 1e-10 * (1.0 + std::abs(f)) &&
                            std::abs(ga - fa) <= 1e-10 * (1.0 + std::abs(fa));
            p.check(ok, [&] { return desc + " x=" + fmt(x) + " anchor=" + fmt(anchor); });
          },
          desc);
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "fixed-gamma objective is a sum of plain ratios plus a constant");
    for (int i = 0; i < 300; ++i) {
      const int n = rng.integer(1, 3);
      std::string desc;
      auto terms = random_log_terms(rng, n, desc);
      terms.front().weight = rng.uniform(0.1, 2.0);
      const Vector anchor = rng.uniform_vector(n, 0.0, 2.0);
      const Vector x = rng.uniform_vector(n, 0.0, 2.0);
      const FeasibleSet box = FeasibleSet::box(Vector::Zero(n), Vector::Constant(n, 2.0));
      p.guard(
          [&] {
            const GammaState gammas = compute_gammas(terms, anchor);
            const SumOfRatiosForm form = to_sum_of_ratios(terms, gammas, box);
            bool ok = true;
            for (const auto& t : form.problem.terms()) {
              ok = ok && (t.outer.kind() == OuterKind::Identity || t.outer.kind() == OuterKind::NegIdentity);
            }
            const double lv = lagrangian_value(terms, x, gammas);
            const double sr = form.constant + mixed_objective(form.problem, x);
            ok = ok && std::abs(lv - sr) <= 1e-10 * (1.0 + std::abs(lv));
            p.check(ok, [&] { return desc + " x=" + fmt(x) + " anchor=" + fmt(anchor); });
          },
          desc);
    }
    out.push_back(p.result());
  }
}

// ---------------------------------------------------------------------------
// apps

secure::Scenario random_secure(Rng& rng) {
  secure::Scenario sc;
  sc.L = rng.integer(1, 5);
  sc.K = rng.integer(0, sc.L);
  sc.h2 = secure::Matrix(sc.L, sc.L);
  for (int i = 0; i < sc.L; ++i)
    for (int j = 0; j < sc.L; ++j) sc.h2(i, j) = i == j ? rng.uniform(0.3, 1.0) : rng.uniform(0.0, 0.2);
  sc.ht2 = secure::Matrix(sc.K, sc.L);
  for (int k = 0; k < sc.K; ++k)
    for (int j = 0; j < sc.L; ++j) sc.ht2(k, j) = k == j ? rng.uniform(0.05, 0.8) : rng.uniform(0.0, 0.2);
  for (int i = 0; i < sc.L; ++i) {
    sc.sigma2.push_back(rng.uniform(0.05, 1.0));
    sc.w.push_back(rng.uniform(0.1, 2.0));
  }
  for (int k = 0; k < sc.K; ++k) sc.sigma2_tilde.push_back(rng.uniform(0.2, 2.0));
  sc.P = rng.uniform(1.0, 20.0);
  return sc;
}

std::string describe(const secure::Scenario& sc) {
  std::ostringstream s;
  s.precision(17);
  s << "L=" << sc.L << " K=" << sc.K << " P=" << sc.P << " h2=" << sc.h2.format(Eigen::IOFormat(17, Eigen::DontAlignCols, " ", "; "))
    << " ht2=" << sc.ht2.format(Eigen::IOFormat(17, Eigen::DontAlignCols, " ", "; ")) << " sigma2=";
  for (double v : sc.sigma2) s << v << ",";
  s << " sigma2~=";
  for (double v : sc.sigma2_tilde) s << v << ",";
  s << " w=";
  for (double v : sc.w) s << v << ",";
  return s.str();
}

radar::Scenario random_radar(Rng& rng) {
  radar::Scenario sc;
  sc.M = rng.integer(2, 3);
  sc.L = rng.integer(1, 2);
  sc.beta = ComplexMatrix(sc.M, sc.M);
  for (int m = 0; m < sc.M; ++m) {
    sc.n_tx.push_back(rng.integer(1, 3));
    sc.n_rx.push_back(rng.integer(2, 3));
    sc.theta.push_back(rng.uniform(-1.2, 1.2));
    sc.sigma2.push_back(rng.uniform(0.1, 1.0));
    sc.power.push_back(rng.uniform(1.0, 100.0));
    for (int k = 0; k < sc.M; ++k) sc.beta(m, k) = rng.complex_normal() / std::sqrt(2.0);
  }
  return sc;
}

std::string describe(const radar::Scenario& sc) {
  std::ostringstream s;
  s.precision(17);
  s << "M=" << sc.M << " L=" << sc.L << " n_tx,n_rx,theta,sigma2,P=";
  for (int m = 0; m < sc.M; ++m) {
    const auto i = static_cast<std::size_t>(m);
    s << "(" << sc.n_tx[i] << "," << sc.n_rx[i] << "," << sc.theta[i] << "," << sc.sigma2[i] << ","
      << sc.power[i] << ")";
  }
  s << " beta=" << fmt(sc.beta);
  return s.str();
}

void aoi_properties(Rng& rng, const std::string& suite, std::vector<PropertyResult>& out) {
  {
    Property p(suite, "AoI closed form equals the sum of its two fractions");
    for (int i = 0; i < 10000; ++i) {
      const int K = rng.integer(1, 10);
      const double mu = rng.uniform(0.5, 2.0);
      const Vector lam = rng.uniform_vector(K, 1e-3 * mu, mu);
      const int k = rng.integer(0, K - 1);
      const double v = aoi::avg_aoi(k, lam, mu);
      const auto [a, b] = aoi::avg_aoi_decomposed(k, lam, mu);
      p.check(std::abs(v - (a + b)) <= 1e-12 * std::abs(v),
              [&] { return "k=" + std::to_string(k) + " mu=" + fmt(mu) + " lambda=" + fmt(lam); });
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "AoI ratio form: objective is -sum AoI and its gradient matches finite differences");
    for (int i = 0; i < 100; ++i) {
      const int K = rng.integer(1, 6);
      const double mu = rng.uniform(0.5, 2.0);
      const Vector lam = rng.uniform_vector(K, 0.05 * mu, mu * 0.95);
      p.guard(
          [&] {
            const MixedFpProblem prob = aoi::build_problem({K, mu});
            const double f = mixed_objective(prob, lam);
            const auto fn = [&](const Vector& x) { return mixed_objective(prob, x); };
            const bool ok = close(f, -aoi::sum_aoi(lam, mu), 1e-12) &&
                            gradient_close(mixed_objective_gradient(prob, lam),
                                           finite_difference_gradient(fn, lam));
            p.check(ok, [&] { return "mu=" + fmt(mu) + " lambda=" + fmt(lam); });
          },
          "mu=" + fmt(mu) + " lambda=" + fmt(lam));
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "AoI rate control beats both baselines for K = 1..10");
    for (int K = 1; K <= 10; ++K) {
      p.guard(
          [&] {
            const aoi::Scenario sc{K, 1.0};
            const double v = aoi::run_algorithm1(sc, SolveOptions{}).solution.sum_aoi;
            const double eq = aoi::baseline_equal_rate(sc).sum_aoi;
            const double mx = aoi::baseline_max_rate(sc).sum_aoi;
            p.check(v <= eq * (1.0 + 1e-9) && v <= mx * (1.0 + 1e-9), [&] {
              return "K=" + std::to_string(K) + " alg=" + fmt(v) + " equal=" + fmt(eq) + " max=" + fmt(mx);
            });
          },
          "K=" + std::to_string(K));
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "AoI MM trace is monotone over 20 seeds");
    for (int s = 0; s < 20; ++s) {
      const aoi::Scenario sc{rng.integer(1, 8), rng.uniform(0.5, 3.0)};
      const std::string desc = "K=" + std::to_string(sc.K) + " mu=" + fmt(sc.mu);
      p.guard(
          [&] {
            const auto r = aoi::run_algorithm1(sc, SolveOptions{});
            p.check(r.trace.nonincreasing(), [&] { return desc; });
          },
          desc);
    }
    out.push_back(p.result());
  }
}

void secure_properties(Rng& rng, const std::string& suite, std::vector<PropertyResult>& out) {
  {
    Property p(suite, "secrecy rate equals its rewritten ln(1+.) + ln(1-.) form");
    for (int i = 0; i < 10000; ++i) {
      const secure::Scenario sc = random_secure(rng);
      const Vector pw = rng.uniform_vector(sc.L, 0.0, sc.P);
      const int k = rng.integer(0, sc.L - 1);
      const double a = secure::secret_rate(sc, pw, k);
      const double b = secure::secret_rate_rewritten(sc, pw, k);
      p.check(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)),
              [&] { return describe(sc) + " i=" + std::to_string(k) + " p=" + fmt(pw); });
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "secure surrogates are tight: f_r, fast surrogate and direct surrogate at the anchor");
    for (int i = 0; i < 300; ++i) {
      const secure::Scenario sc = random_secure(rng);
      const Vector pw = rng.uniform_vector(sc.L, 0.05 * sc.P, sc.P);
      p.guard(
          [&] {
            const double f = secure::weighted_sum_rate(sc, pw);
            const GammaState gammas = secure::fast_fp_gamma(sc, pw);
            const double fr = secure::fast_fp_objective_fr(sc, pw, gammas);
            const SumOfRatiosForm form = secure::fast_fp_ratio_form(sc, gammas);
            const AuxState aux = secure::fast_fp_aux(sc, pw, gammas);
            const auto sub = secure::fast_fp_subproblem(sc, pw, gammas, aux);
            const auto direct = secure::direct_fp_surrogate(sc, pw, secure::direct_fp_aux(sc, pw));
            const double tol = 1e-10 * (1.0 + std::abs(f));
            const bool ok = std::abs(fr - f) <= tol && sub && std::abs(form.constant + sub->value - fr) <= tol &&
                            direct && std::abs(direct->value - f) <= tol;
            p.check(ok, [&] { return describe(sc) + " p=" + fmt(pw); });
          },
          describe(sc));
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "secure surrogate gradients match finite differences (rel 1e-5)");
    for (int i = 0; i < 200; ++i) {
      const secure::Scenario sc = random_secure(rng);
      const Vector anchor = rng.uniform_vector(sc.L, 0.2 * sc.P, 0.8 * sc.P);
      const Vector pw = anchor + 0.01 * sc.P * rng.uniform_vector(sc.L, -1.0, 1.0);
      p.guard(
          [&] {
            const AuxState daux = secure::direct_fp_aux(sc, anchor);
            const auto dg = secure::direct_fp_surrogate(sc, pw, daux);
            const auto dfn = [&](const Vector& x) { return secure::direct_fp_surrogate(sc, x, daux)->value; };
            const GammaState gammas = secure::fast_fp_gamma(sc, anchor);
            const AuxState faux = secure::fast_fp_aux(sc, anchor, gammas);
            const auto fg = secure::fast_fp_subproblem(sc, pw, gammas, faux);
            const auto ffn = [&](const Vector& x) {
              return secure::fast_fp_subproblem(sc, x, gammas, faux)->value;
            };
            bool ok = true;
            if (dg) ok = gradient_close(dg->gradient, finite_difference_gradient(dfn, pw));
            if (fg) ok = ok && gradient_close(fg->gradient, finite_difference_gradient(ffn, pw));
            p.check(ok, [&] { return describe(sc) + " p=" + fmt(pw) + " anchor=" + fmt(anchor); });
          },
          describe(sc));
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "direct and fast secure MM traces are monotone over 20 seeds");
    for (int s = 0; s < 20; ++s) {
      const secure::Scenario sc = random_secure(rng);
      p.guard(
          [&] {
            SolveOptions opts;
            opts.max_outer = 200;
            const auto a3 = secure::run_algorithm3(sc, opts);
            const auto a4 = secure::run_algorithm4(sc, opts);
            p.check(a3.trace.nondecreasing() && a4.trace.nondecreasing(), [&] { return describe(sc); });
          },
          describe(sc));
    }
    out.push_back(p.result());
  }
}

void radar_properties(Rng& rng, const std::string& suite, std::vector<PropertyResult>& out) {
  {
    Property p(suite, "radar Q+ equals half the Fisher information at the optimal auxiliaries");
    for (int i = 0; i < 50; ++i) {
      const radar::Scenario sc = random_radar(rng);
      const radar::WaveformSet w = radar::unpack(sc, [&] {
        std::vector<ComplexVector> s;
        for (int m = 0; m < sc.M; ++m) s.push_back(rng.complex_matrix(sc.signal_length(m), 1).col(0));
        return pack_complex(s);
      }());
      p.guard(
          [&] {
            const auto q = radar::q_plus_values(sc, w, radar::radar_aux(sc, w));
            bool ok = true;
            for (int m = 0; m < sc.M; ++m) {
              const double J = radar::fisher_information(sc, w, m);
              ok = ok && std::abs(q[static_cast<std::size_t>(m)] - J / 2.0) <= 1e-10 * J / 2.0;
            }
            p.check(ok, [&] { return describe(sc); });
          },
          describe(sc));
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "radar derivatives match finite differences (rel 1e-5)");
    for (int i = 0; i < 50; ++i) {
      const radar::Scenario sc = random_radar(rng);
      p.guard(
          [&] {
            bool ok = true;
            const double h = 1e-6;
            for (int m = 0; m < sc.M; ++m) {
              const auto mi = static_cast<std::size_t>(m);
              const double th = sc.theta[mi];
              const int N = sc.n_rx[mi];
              const ComplexVector fd =
                  (radar::steering_vector(N, th + h) - radar::steering_vector(N, th - h)) / (2.0 * h);
              ok = ok && (radar::steering_derivative(N, th) - fd).norm() <= 1e-5 * (fd.norm() + 1e-8);
              radar::Scenario up = sc;
              radar::Scenario dn = sc;
              up.theta[mi] += h;
              dn.theta[mi] -= h;
              const ComplexMatrix fdG =
                  (radar::response_matrix(up, m, m) - radar::response_matrix(dn, m, m)) / (2.0 * h);
              ok = ok && (radar::response_derivative(sc, m) - fdG).norm() <= 1e-5 * (fdG.norm() + 1e-8);
            }
            const radar::WaveformSet anchor = radar::initial_waveforms(sc, rng.next());
            std::vector<ComplexVector> s;
            for (int m = 0; m < sc.M; ++m) {
              s.push_back(anchor.s[static_cast<std::size_t>(m)] +
                          0.01 * rng.complex_matrix(sc.signal_length(m), 1).col(0));
            }
            const Vector x = pack_complex(s);
            const radar::RadarAux aux = radar::radar_aux(sc, anchor);
            const auto v = radar::radar_subproblem_objective(sc, radar::unpack(sc, x), aux);
            if (v) {
              const auto fn = [&](const Vector& y) {
                const auto r = radar::radar_subproblem_objective(sc, radar::unpack(sc, y), aux);
                return r ? r->value : -std::numeric_limits<double>::infinity();
              };
              ok = ok && gradient_close(pack_complex(v->gradient), finite_difference_gradient(fn, x));
            }
            p.check(ok, [&] { return describe(sc); });
          },
          describe(sc));
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "radar Schur-complement lift agrees with the direct objective at the solution");
    for (int i = 0; i < 10; ++i) {
      const radar::Scenario sc = random_radar(rng);
      p.guard(
          [&] {
            SolveOptions opts;
            opts.max_outer = 30;
            opts.seed = rng.next();
            const auto r = radar::run_algorithm2(sc, opts);
            const double direct = -radar::sum_crb(sc, r.waveforms);
            const double lifted = radar::schur_lift_objective(sc, r.waveforms);
            const double lo = radar::schur_lift_min_eigenvalue(r.waveforms);
            p.check(std::abs(lifted - direct) <= 1e-10 * std::abs(direct) && lo >= -1e-9, [&] {
              return describe(sc) + " direct=" + fmt(direct) + " lifted=" + fmt(lifted) + " min_eig=" + fmt(lo);
            });
          },
          describe(sc));
    }
    out.push_back(p.result());
  }

  {
    Property p(suite, "radar MM trace is monotone over 20 seeds");
    for (int s = 0; s < 20; ++s) {
      const radar::Scenario sc = random_radar(rng);
      p.guard(
          [&] {
            SolveOptions opts;
            opts.max_outer = 50;
            opts.seed = static_cast<std::uint64_t>(s);
            const auto r = radar::run_algorithm2(sc, opts);
            p.check(r.trace.nonincreasing(), [&] { return describe(sc); });
          },
          describe(sc));
    }
    out.push_back(p.result());
  }
}

void apps_suite(std::uint64_t seed, std::vector<PropertyResult>& out) {
  Rng rng(seed + 3);
  aoi_properties(rng, "apps", out);
  secure_properties(rng, "apps", out);
  radar_properties(rng, "apps", out);
}

}  // namespace

std::optional<Suite> parse_suite(std::string_view name) {
  if (name == "core") return Suite::Core;
  if (name == "matrix") return Suite::Matrix;
  if (name == "lagrangian") return Suite::Lagrangian;
  if (name == "apps") return Suite::Apps;
  if (name == "all") return Suite::All;
  return std::nullopt;
}

std::string_view suite_name(Suite suite) {
  switch (suite) {
    case Suite::Core: return "core";
    case Suite::Matrix: return "matrix";
    case Suite::Lagrangian: return "lagrangian";
    case Suite::Apps: return "apps";
    case Suite::All: return "all";
  }
  return "unknown";
}

std::vector<PropertyResult> run_suite(Suite suite, std::uint64_t seed) {
  std::vector<PropertyResult> out;
  const bool all = suite == Suite::All;
  if (all || suite == Suite::Core) core_suite(seed, out);
  if (all || suite == Suite::Matrix) matrix_suite(seed, out);
  if (all || suite == Suite::Lagrangian) lagrangian_suite(seed, out);
  if (all || suite == Suite::Apps) apps_suite(seed, out);
  return out;
}

int run_verify(Suite suite, std::ostream& out, std::uint64_t seed) {
  const auto results = run_suite(suite, seed);
  int failed = 0;
  for (const auto& r : results) {
    out << (r.passed() ? "PASS " : "FAIL ") << r.suite << ": " << r.name << " (" << r.cases
        << " cases";
    if (!r.passed()) out << ", " << r.failures << " failed";
    out << ")\n";
    if (!r.passed()) {
      ++failed;
      out << "  counterexample: " << r.counterexample << "\n";
    }
  }
  out << (failed == 0 ? "all " + std::to_string(results.size()) + " properties passed\n"
                      : std::to_string(failed) + " of " + std::to_string(results.size()) +
                            " properties failed\n");
  return failed == 0 ? 0 : 3;
}

}  // namespace fpkit::verify
