#include "fpkit/fp_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "fpkit/errors.hpp"

namespace fpkit {

namespace {

void require_square(const ComplexMatrix& M, const char* op) {
  if (M.rows() != M.cols()) throw InvalidInput(std::string(op) + ": matrix must be square");
}

void require_rows(const ComplexMatrix& factor, const ComplexMatrix& square, const char* op) {
  if (factor.rows() != square.rows()) {
    throw InvalidInput(std::string(op) + ": shape mismatch between factor and matrix");
  }
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& M) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(M), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw IllConditioned("eigenvalue decomposition failed");
  return es.eigenvalues();
}

// LDLT-backed solve after checking B is PD with an acceptable condition number.
ComplexMatrix solve_pd(const ComplexMatrix& B, const ComplexMatrix& rhs, const char* op) {
  require_square(B, op);
  const Eigen::VectorXd ev = hermitian_eigenvalues(B);
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    throw IllConditioned(std::string(op) + ": matrix is singular or ill-conditioned");
  }
  Eigen::LDLT<ComplexMatrix> ldlt(hermitian_part(B));
  return ldlt.solve(rhs);
}

}  // namespace

ComplexMatrix hermitian_part(const ComplexMatrix& M) {
  require_square(M, "hermitian_part");
  return 0.5 * (M + M.adjoint());
}

bool is_hermitian(const ComplexMatrix& M, double rel_tol) {
  if (M.rows() != M.cols()) return false;
  return (M - M.adjoint()).norm() <= rel_tol * std::max(M.norm(), 1e-300);
}

double min_eigenvalue(const ComplexMatrix& hermitian) {
  return hermitian_eigenvalues(hermitian).minCoeff();
}

bool is_positive_definite(const ComplexMatrix& hermitian) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(hermitian);
  const double trace = ev.sum();
  return ev.minCoeff() > 1e-12 * std::abs(trace) && ev.minCoeff() > 0.0;
}

ComplexMatrix matrix_ratio(const ComplexMatrix& A_sqrt, const ComplexMatrix& B) {
  require_rows(A_sqrt, B, "matrix_ratio");
  return hermitian_part(A_sqrt.adjoint() * solve_pd(B, A_sqrt, "matrix_ratio"));
}

ComplexMatrix q_plus(const ComplexMatrix& A_sqrt, const ComplexMatrix& B, const ComplexMatrix& Y) {
  require_square(B, "q_plus");
  require_rows(A_sqrt, B, "q_plus");
  if (Y.rows() != A_sqrt.rows() || Y.cols() != A_sqrt.cols()) {
    throw InvalidInput("q_plus: Y must have the shape of sqrt(A)");
  }
  const ComplexMatrix cross = A_sqrt.adjoint() * Y;
  return hermitian_part(cross + cross.adjoint() - Y.adjoint() * B * Y);
}

ComplexMatrix q_minus(const ComplexMatrix& B_sqrt, const ComplexMatrix& A,
                      const ComplexMatrix& Y_tilde) {
  require_square(A, "q_minus");
  require_rows(B_sqrt, A, "q_minus");
  if (Y_tilde.rows() != B_sqrt.rows() || Y_tilde.cols() != B_sqrt.cols()) {
    throw InvalidInput("q_minus: Y~ must have the shape of sqrt(B)");
  }
  const ComplexMatrix cross = B_sqrt.adjoint() * Y_tilde;
  return hermitian_part(cross + cross.adjoint() - Y_tilde.adjoint() * A * Y_tilde);
}

ComplexMatrix opt_Y(const ComplexMatrix& A_sqrt, const ComplexMatrix& B) {
  require_rows(A_sqrt, B, "opt_Y");
  return solve_pd(B, A_sqrt, "opt_Y");
}

ComplexMatrix opt_Y_tilde(const ComplexMatrix& B_sqrt, const ComplexMatrix& A) {
  require_rows(B_sqrt, A, "opt_Y_tilde");
  return solve_pd(A, B_sqrt, "opt_Y_tilde");
}

ComplexMatrix psd_sqrt(const ComplexMatrix& M, int ell) {
  require_square(M, "psd_sqrt");
  const auto d = static_cast<int>(M.rows());
  if (ell < 1 || ell > d) throw InvalidInput("psd_sqrt: ell must lie in [1, d]");
  if (!is_hermitian(M, 1e-10)) throw InvalidInput("psd_sqrt: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(M));
  if (es.info() != Eigen::Success) throw IllConditioned("psd_sqrt: eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  const double scale = std::max(M.norm(), 1e-300);
  if (ev.minCoeff() < -1e-9 * scale) throw InvalidInput("psd_sqrt: matrix is not PSD");

  // Keep the ell largest eigenpairs; whatever is dropped must be numerically zero.
  for (int i = 0; i < d - ell; ++i) {
    if (ev[i] > 1e-10 * scale) throw InvalidInput("psd_sqrt: ell is below the rank of M");
  }
  ComplexMatrix F(d, ell);
  for (int j = 0; j < ell; ++j) {
    const int idx = d - ell + j;
    const double lam = ev[idx] < 0.0 ? 0.0 : ev[idx];
    F.col(j) = es.eigenvectors().col(idx) * std::sqrt(lam);
  }
  return F;
}

bool MatrixOuter::increasing() const noexcept {
  return kind == MatrixOuterKind::Trace || kind == MatrixOuterKind::LogDetIPlus;
}

double MatrixOuter::evaluate(const ComplexMatrix& X) const {
  require_square(X, "MatrixOuter::evaluate");
  switch (kind) {
    case MatrixOuterKind::Trace:
      return weight * X.trace().real();
    case MatrixOuterKind::NegTrace:
      return -weight * X.trace().real();
    case MatrixOuterKind::LogDetIPlus:
    case MatrixOuterKind::NegLogDetIPlus: {
      const ComplexMatrix IX = ComplexMatrix::Identity(X.rows(), X.cols()) + hermitian_part(X);
      Eigen::LDLT<ComplexMatrix> ldlt(IX);
      if (ldlt.info() != Eigen::Success || (ldlt.vectorD().real().array() <= 0.0).any()) {
        throw DomainError("log det(I + X) requires I + X positive definite");
      }
      const double logdet = ldlt.vectorD().real().array().log().sum();
      return kind == MatrixOuterKind::LogDetIPlus ? weight * logdet : -weight * logdet;
    }
  }
  return 0.0;
}

bool cyclic_check(MatrixOuterKind kind, const ComplexMatrix& A_sqrt, const ComplexMatrix& B_sqrt) {
  const ComplexMatrix A = A_sqrt * A_sqrt.adjoint();
  const ComplexMatrix B = B_sqrt * B_sqrt.adjoint();
  const ComplexMatrix inner = matrix_ratio(A_sqrt, B);
  const ComplexMatrix inner_inv = solve_pd(inner, ComplexMatrix::Identity(inner.rows(), inner.cols()),
                                           "cyclic_check");
  const MatrixOuter f{kind, 1.0};
  const double lhs = f.evaluate(hermitian_part(inner_inv));
  const double rhs = f.evaluate(matrix_ratio(B_sqrt, A));
  return std::abs(lhs - rhs) <= 1e-9 * std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

ComplexMatrix MatrixRatioTerm::sqrt_numerator(const Vector& x) const {
  if (numerator_sqrt) return numerator_sqrt(x);
  const ComplexMatrix A = numerator(x);
  return psd_sqrt(A, static_cast<int>(A.rows()));
}

ComplexMatrix MatrixRatioTerm::sqrt_denominator(const Vector& x) const {
  if (denominator_sqrt) return denominator_sqrt(x);
  const ComplexMatrix B = denominator(x);
  return psd_sqrt(B, static_cast<int>(B.rows()));
}

double matrix_mixed_objective(const std::vector<MatrixRatioTerm>& terms, const Vector& x) {
  double total = 0.0;
  for (const auto& t : terms) {
    total += t.outer.evaluate(matrix_ratio(t.sqrt_numerator(x), t.denominator(x)));
  }
  return total;
}

std::optional<double> matrix_mixed_surrogate(const std::vector<MatrixRatioTerm>& terms,
                                             const Vector& x, const Vector& anchor) {
  double total = 0.0;
  for (const auto& t : terms) {
    if (t.outer.increasing()) {
      const ComplexMatrix Y = opt_Y(t.sqrt_numerator(anchor), t.denominator(anchor));
      try {
        total += t.outer.evaluate(q_plus(t.sqrt_numerator(x), t.denominator(x), Y));
      } catch (const DomainError&) {
        return std::nullopt;
      }
    } else {
      const ComplexMatrix Yt = opt_Y_tilde(t.sqrt_denominator(anchor), t.numerator(anchor));
      const ComplexMatrix Qm = q_minus(t.sqrt_denominator(x), t.numerator(x), Yt);
      if (!is_positive_definite(Qm)) return std::nullopt;
      const ComplexMatrix Qm_inv =
          solve_pd(Qm, ComplexMatrix::Identity(Qm.rows(), Qm.cols()), "matrix_mixed_surrogate");
      total += t.outer.evaluate(hermitian_part(Qm_inv));
    }
  }
  return total;
}

}  // namespace fpkit
