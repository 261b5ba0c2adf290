#pragma once

// Matrix-ratio extension of the unified quadratic transform.
//
// For A in H+ (d x d), B in H++ and a square-root factor sqrt(A) (d x l) with
// sqrt(A) sqrt(A)^H = A:
//   Q+ = sqrt(A)^H Y + Y^H sqrt(A) - Y^H B Y   <=  sqrt(A)^H B^-1 sqrt(A)
// in the PSD order, tight at Y = B^-1 sqrt(A). The min side mirrors it with
// A and B swapped.

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fpkit/feasible_set.hpp"

namespace fpkit {

using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kMaxCondition = 1e14;

/// (M + M^H) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& M);
bool is_hermitian(const ComplexMatrix& M, double rel_tol = kHermitianTol);
double min_eigenvalue(const ComplexMatrix& hermitian);

/// Hermitian positive-definite check with the strict margin lambda_min > 1e-12 * |trace|.
bool is_positive_definite(const ComplexMatrix& hermitian);

/// sqrt(A)^H B^-1 sqrt(A). Throws IllConditioned when cond(B) > 1e14 or B is not PD.
ComplexMatrix matrix_ratio(const ComplexMatrix& A_sqrt, const ComplexMatrix& B);

ComplexMatrix q_plus(const ComplexMatrix& A_sqrt, const ComplexMatrix& B, const ComplexMatrix& Y);
ComplexMatrix q_minus(const ComplexMatrix& B_sqrt, const ComplexMatrix& A,
                      const ComplexMatrix& Y_tilde);

/// B^-1 sqrt(A).
ComplexMatrix opt_Y(const ComplexMatrix& A_sqrt, const ComplexMatrix& B);
/// A^-1 sqrt(B).
ComplexMatrix opt_Y_tilde(const ComplexMatrix& B_sqrt, const ComplexMatrix& A);

/// Factor F (d x ell) with F F^H = M, from a Hermitian eigendecomposition.
/// Slightly negative eigenvalues (>= -1e-12 |M|) are clamped to zero; below
/// -1e-9 |M| the matrix is rejected as not PSD. Requires ell >= rank(M).
ComplexMatrix psd_sqrt(const ComplexMatrix& M, int ell);

enum class MatrixOuterKind {
  Trace,           // tr(X), increasing
  LogDetIPlus,     // log det(I + X), increasing
  NegTrace,        // -tr(X), decreasing
  NegLogDetIPlus,  // -log det(I + X), decreasing
};

/// Matrix outer function with a nonnegative weight. All four kinds satisfy
/// f((sqrt(A)^H B^-1 sqrt(A))^-1) = f(sqrt(B)^H A^-1 sqrt(B)).
struct MatrixOuter {
  MatrixOuterKind kind = MatrixOuterKind::Trace;
  double weight = 1.0;

  bool increasing() const noexcept;
  double evaluate(const ComplexMatrix& X) const;
};

/// Evaluates f((sqrt(A)^H B^-1 sqrt(A))^-1) and f(sqrt(B)^H A^-1 sqrt(B)) and
/// reports whether they agree to relative 1e-9.
bool cyclic_check(MatrixOuterKind kind, const ComplexMatrix& A_sqrt, const ComplexMatrix& B_sqrt);

/// One matrix ratio as a function of a real decision vector. The square-root
/// factor callbacks are optional; psd_sqrt (ell = d) is used when absent.
struct MatrixRatioTerm {
  std::function<ComplexMatrix(const Vector&)> numerator;
  std::function<ComplexMatrix(const Vector&)> denominator;
  MatrixOuter outer;
  std::function<ComplexMatrix(const Vector&)> numerator_sqrt = {};
  std::function<ComplexMatrix(const Vector&)> denominator_sqrt = {};

  ComplexMatrix sqrt_numerator(const Vector& x) const;
  ComplexMatrix sqrt_denominator(const Vector& x) const;
};

/// Sum of f(sqrt(A)^H B^-1 sqrt(A)) over all terms.
double matrix_mixed_objective(const std::vector<MatrixRatioTerm>& terms, const Vector& x);

/// g(x | anchor) = sum f+(Q+) + sum f-((Q-)^-1) with Y, Y~ computed at anchor.
/// nullopt when some Q- is not positive definite (reject the point).
std::optional<double> matrix_mixed_surrogate(const std::vector<MatrixRatioTerm>& terms,
                                             const Vector& x, const Vector& anchor);

}  // namespace fpkit
