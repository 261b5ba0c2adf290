#pragma once

// Scalar fractional-programming transforms.
//
// A mixed max-and-min problem maximizes
//     sum_{max terms} f+(A/B) + sum_{min terms} f-(A/B)
// with f+ concave increasing and f- concave decreasing. The quadratic
// transform lower-bounds a max-side ratio by 2y*sqrt(A) - y^2*B; the inverse
// quadratic transform upper-bounds a min-side ratio by 1/[2y~*sqrt(B) - y~^2*A]_+.
// Plugging the bounds into the outer functions yields a surrogate that is a
// tight minorizer of the objective at the anchor where y, y~ were computed.

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "fpkit/feasible_set.hpp"

namespace fpkit {

inline constexpr double kDefaultEps = 1e-12;

/// A real number or +infinity. Never converts an infinite value to a finite one.
class ExtendedReal {
 public:
  /// Throws InvalidInput unless `v` is finite.
  explicit ExtendedReal(double v);
  static ExtendedReal infinity() noexcept { return ExtendedReal(); }

  bool is_infinite() const noexcept { return infinite_; }
  /// Finite value; throws DomainError when infinite.
  double value() const;
  /// IEEE view: +inf when infinite.
  double to_double() const noexcept;

  friend ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b) noexcept;
  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) noexcept;
  friend std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) noexcept;

 private:
  ExtendedReal() noexcept : value_(0.0), infinite_(true) {}
  double value_;
  bool infinite_;
};

/// Result of [a]_+ : either a positive real, or the 0+ limit whose
/// reciprocal is +infinity.
class PositivePart {
 public:
  bool is_zero_plus() const noexcept { return value_ <= 0.0; }
  double value() const noexcept { return value_; }
  ExtendedReal reciprocal() const noexcept;

 private:
  friend PositivePart plus_part(double a);
  explicit PositivePart(double v) noexcept : value_(v) {}
  double value_;
};

PositivePart plus_part(double a);

enum class OuterKind { Identity, WeightedLog1p, WeightedLog1m, NegHalfInverse, NegIdentity };

/// Closed set of outer functions with analytic derivatives and monotonicity metadata.
///   Identity(w)      f(r) = w r            increasing
///   WeightedLog1p(w) f(r) = w ln(1 + r)    increasing, r > -1
///   WeightedLog1m(w) f(r) = w ln(1 - r)    decreasing, r < 1
///   NegHalfInverse   f(r) = -1/(2 r)       increasing, r > 0
///   NegIdentity(w)   f(r) = -w r           decreasing
class OuterFunction {
 public:
  static OuterFunction identity(double w = 1.0);
  static OuterFunction log1p(double w = 1.0);
  static OuterFunction log1m(double w = 1.0);
  static OuterFunction neg_half_inverse();
  static OuterFunction neg_identity(double w = 1.0);

  OuterKind kind() const noexcept { return kind_; }
  double weight() const noexcept { return weight_; }
  bool increasing() const noexcept;
  bool in_domain(double r) const noexcept;

  /// Throws DomainError outside the domain.
  double evaluate(double r) const;
  double derivative(double r) const;
  /// lim_{r -> +inf} f(r); may be +-inf.
  double at_infinity() const noexcept;

 private:
  OuterFunction(OuterKind kind, double weight);
  OuterKind kind_;
  double weight_;
};

enum class Side { Max, Min };

struct ValueGrad {
  double value = 0.0;
  Vector gradient;
};

using SmoothFn = std::function<ValueGrad(const Vector&)>;

/// One ratio A(x)/B(x) nested inside an outer function.
struct RatioTerm {
  RatioTerm(SmoothFn numerator, SmoothFn denominator, OuterFunction outer, Side side);

  SmoothFn numerator;
  SmoothFn denominator;
  OuterFunction outer;
  Side side;
};

/// Auxiliary variables: y per max-side term, y~ per min-side term, in term order.
struct AuxState {
  std::vector<double> y;
  std::vector<double> y_tilde;
};

class MixedFpProblem {
 public:
  MixedFpProblem(std::vector<RatioTerm> terms, FeasibleSet feasible);

  const std::vector<RatioTerm>& terms() const noexcept { return terms_; }
  const FeasibleSet& feasible() const noexcept { return feasible_; }
  std::size_t dimension() const noexcept { return feasible_.dimension(); }
  std::size_t max_side_count() const noexcept { return max_count_; }
  std::size_t min_side_count() const noexcept { return terms_.size() - max_count_; }

 private:
  std::vector<RatioTerm> terms_;
  FeasibleSet feasible_;
  std::size_t max_count_ = 0;
};

/// 2 y sqrt(A) - y^2 B.
double quad_surrogate(double A, double B, double y);
/// sqrt(A) / B.
double opt_y(double A, double B);
/// 1 / [2 y~ sqrt(B) - y~^2 A]_+.
ExtendedReal inv_quad_surrogate(double A, double B, double y_tilde);
/// sqrt(B) / (A + eps).
double opt_y_tilde(double A, double B, double eps = kDefaultEps);

double mixed_objective(const MixedFpProblem& problem, const Vector& x);
Vector mixed_objective_gradient(const MixedFpProblem& problem, const Vector& x);

/// Closed-form auxiliary update at `anchor` with the eps-safeguarded y~.
AuxState compute_aux(const MixedFpProblem& problem, const Vector& anchor,
                     double eps = kDefaultEps);

/// Surrogate value at x for fixed auxiliaries. Returns -inf when a term falls
/// into the clamp branch (or out of its outer's domain) and the outer is
/// unbounded below there.
double surrogate_value(const MixedFpProblem& problem, const Vector& x, const AuxState& aux);

/// Value and gradient of the surrogate; nullopt when x must be rejected
/// (clamp branch, outer domain violation, or feasible-set domain guard).
std::optional<ValueGrad> surrogate_value_grad(const MixedFpProblem& problem, const Vector& x,
                                              const AuxState& aux);

/// g(x | anchor) with the exact auxiliaries sqrt(A)/B and sqrt(B)/A at anchor.
double mixed_surrogate(const MixedFpProblem& problem, const Vector& x, const Vector& anchor);

}  // namespace fpkit
