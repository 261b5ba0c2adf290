#include "fpkit/fp_core.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "fpkit/errors.hpp"

namespace fpkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Floor for sqrt(A) in gradients so a vanishing numerator yields a huge but
// finite slope; the projection bounds the resulting step.
constexpr double kSqrtFloor = 1e-150;

void check_ratio_inputs(const char* op, double A, double B) {
  if (!std::isfinite(A) || !std::isfinite(B)) {
    throw InvalidInput(std::string(op) + ": non-finite input");
  }
  if (A < 0.0) throw InvalidInput(std::string(op) + ": numerator must be nonnegative");
  if (B <= 0.0) throw InvalidInput(std::string(op) + ": denominator must be positive");
}

struct TermEval {
  double A;
  double B;
  Vector dA;
  Vector dB;
};

TermEval eval_term(const RatioTerm& term, const Vector& x) {
  ValueGrad a = term.numerator(x);
  ValueGrad b = term.denominator(x);
  return {a.value, b.value, std::move(a.gradient), std::move(b.gradient)};
}

}  // namespace

// ---------------------------------------------------------------------------
// ExtendedReal / PositivePart

ExtendedReal::ExtendedReal(double v) : value_(v), infinite_(false) {
  if (!std::isfinite(v)) throw InvalidInput("ExtendedReal: use infinity() for +inf");
}

double ExtendedReal::value() const {
  if (infinite_) throw DomainError("ExtendedReal: value() on +infinity");
  return value_;
}

double ExtendedReal::to_double() const noexcept { return infinite_ ? kInf : value_; }

ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b) noexcept {
  if (a.infinite_ || b.infinite_) return ExtendedReal::infinity();
  const double s = a.value_ + b.value_;
  if (!std::isfinite(s)) return ExtendedReal::infinity();
  return ExtendedReal(s);
}

bool operator==(const ExtendedReal& a, const ExtendedReal& b) noexcept {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) noexcept {
  if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
  if (a.infinite_) return std::partial_ordering::greater;
  if (b.infinite_) return std::partial_ordering::less;
  return a.value_ <=> b.value_;
}

ExtendedReal PositivePart::reciprocal() const noexcept {
  if (is_zero_plus()) return ExtendedReal::infinity();
  const double r = 1.0 / value_;
  if (!std::isfinite(r)) return ExtendedReal::infinity();
  return ExtendedReal(r);
}

PositivePart plus_part(double a) { return PositivePart(a > 0.0 ? a : 0.0); }

// ---------------------------------------------------------------------------
// OuterFunction

OuterFunction::OuterFunction(OuterKind kind, double weight) : kind_(kind), weight_(weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw InvalidInput("OuterFunction: weight must be finite and nonnegative");
  }
}

OuterFunction OuterFunction::identity(double w) { return {OuterKind::Identity, w}; }
OuterFunction OuterFunction::log1p(double w) { return {OuterKind::WeightedLog1p, w}; }
OuterFunction OuterFunction::log1m(double w) { return {OuterKind::WeightedLog1m, w}; }
OuterFunction OuterFunction::neg_half_inverse() { return {OuterKind::NegHalfInverse, 1.0}; }
OuterFunction OuterFunction::neg_identity(double w) { return {OuterKind::NegIdentity, w}; }

bool OuterFunction::increasing() const noexcept {
  switch (kind_) {
    case OuterKind::Identity:
    case OuterKind::WeightedLog1p:
    case OuterKind::NegHalfInverse:
      return true;
    case OuterKind::WeightedLog1m:
    case OuterKind::NegIdentity:
      return false;
  }
  return true;
}

bool OuterFunction::in_domain(double r) const noexcept {
  if (!std::isfinite(r)) return false;
  switch (kind_) {
    case OuterKind::Identity:
    case OuterKind::NegIdentity:
      return true;
    case OuterKind::WeightedLog1p:
      return r > -1.0;
    case OuterKind::WeightedLog1m:
      return r < 1.0;
    case OuterKind::NegHalfInverse:
      return r > 0.0;
  }
  return false;
}

double OuterFunction::evaluate(double r) const {
  if (!in_domain(r)) throw DomainError("OuterFunction: ratio outside domain");
  switch (kind_) {
    case OuterKind::Identity: return weight_ * r;
    case OuterKind::WeightedLog1p: return weight_ * std::log1p(r);
    case OuterKind::WeightedLog1m: return weight_ * std::log1p(-r);
    case OuterKind::NegHalfInverse: return -0.5 / r;
    case OuterKind::NegIdentity: return -weight_ * r;
  }
  return 0.0;
}

double OuterFunction::derivative(double r) const {
  if (!in_domain(r)) throw DomainError("OuterFunction: ratio outside domain");
  switch (kind_) {
    case OuterKind::Identity: return weight_;
    case OuterKind::WeightedLog1p: return weight_ / (1.0 + r);
    case OuterKind::WeightedLog1m: return -weight_ / (1.0 - r);
    case OuterKind::NegHalfInverse: return 0.5 / (r * r);
    case OuterKind::NegIdentity: return -weight_;
  }
  return 0.0;
}

double OuterFunction::at_infinity() const noexcept {
  switch (kind_) {
    case OuterKind::Identity:
    case OuterKind::WeightedLog1p:
      return weight_ > 0.0 ? kInf : 0.0;
    case OuterKind::WeightedLog1m:
    case OuterKind::NegIdentity:
      return weight_ > 0.0 ? -kInf : 0.0;
    case OuterKind::NegHalfInverse:
      return 0.0;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Terms and problems

RatioTerm::RatioTerm(SmoothFn num, SmoothFn den, OuterFunction f, Side s)
    : numerator(std::move(num)), denominator(std::move(den)), outer(f), side(s) {
  if (!numerator || !denominator) throw InvalidInput("RatioTerm: missing A or B");
  if ((side == Side::Max) != outer.increasing()) {
    throw InvalidInput("RatioTerm: max side needs an increasing outer, min side a decreasing one");
  }
}

MixedFpProblem::MixedFpProblem(std::vector<RatioTerm> terms, FeasibleSet feasible)
    : terms_(std::move(terms)), feasible_(std::move(feasible)) {
  if (terms_.empty()) throw InvalidInput("MixedFpProblem: at least one term required");
  for (const auto& t : terms_) {
    if (t.side == Side::Max) ++max_count_;
  }
}

// ---------------------------------------------------------------------------
// Scalar transforms

double quad_surrogate(double A, double B, double y) {
  check_ratio_inputs("quad_surrogate", A, B);
  return 2.0 * y * std::sqrt(A) - y * y * B;
}

double opt_y(double A, double B) {
  check_ratio_inputs("opt_y", A, B);
  return std::sqrt(A) / B;
}

ExtendedReal inv_quad_surrogate(double A, double B, double y_tilde) {
  check_ratio_inputs("inv_quad_surrogate", A, B);
  return plus_part(2.0 * y_tilde * std::sqrt(B) - y_tilde * y_tilde * A).reciprocal();
}

double opt_y_tilde(double A, double B, double eps) {
  check_ratio_inputs("opt_y_tilde", A, B);
  if (!(eps > 0.0)) throw InvalidInput("opt_y_tilde: eps must be positive");
  return std::sqrt(B) / (A + eps);
}

// ---------------------------------------------------------------------------
// Problem-level evaluation

double mixed_objective(const MixedFpProblem& problem, const Vector& x) {
  double total = 0.0;
  const auto& terms = problem.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double A = terms[i].numerator(x).value;
    const double B = terms[i].denominator(x).value;
    if (!(B > 0.0)) throw DomainError("mixed_objective: nonpositive denominator", i);
    const double r = A / B;
    if (!terms[i].outer.in_domain(r)) throw DomainError("mixed_objective: ratio outside domain", i);
    total += terms[i].outer.evaluate(r);
  }
  return total;
}

Vector mixed_objective_gradient(const MixedFpProblem& problem, const Vector& x) {
  Vector grad = Vector::Zero(x.size());
  const auto& terms = problem.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    TermEval e = eval_term(terms[i], x);
    if (!(e.B > 0.0)) throw DomainError("mixed_objective_gradient: nonpositive denominator", i);
    const double r = e.A / e.B;
    if (!terms[i].outer.in_domain(r)) {
      throw DomainError("mixed_objective_gradient: ratio outside domain", i);
    }
    const double fp = terms[i].outer.derivative(r);
    grad += fp * (e.dA / e.B - (e.A / (e.B * e.B)) * e.dB);
  }
  return grad;
}

AuxState compute_aux(const MixedFpProblem& problem, const Vector& anchor, double eps) {
  AuxState aux;
  aux.y.reserve(problem.max_side_count());
  aux.y_tilde.reserve(problem.min_side_count());
  for (const auto& t : problem.terms()) {
    const double A = std::max(t.numerator(anchor).value, 0.0);
    const double B = t.denominator(anchor).value;
    if (t.side == Side::Max) {
      aux.y.push_back(opt_y(A, B));
    } else {
      aux.y_tilde.push_back(opt_y_tilde(A, B, eps));
    }
  }
  return aux;
}

namespace {

void check_aux_shape(const MixedFpProblem& problem, const AuxState& aux) {
  if (aux.y.size() != problem.max_side_count() ||
      aux.y_tilde.size() != problem.min_side_count()) {
    throw InvalidInput("auxiliary state does not match the term partition");
  }
}

}  // namespace

double surrogate_value(const MixedFpProblem& problem, const Vector& x, const AuxState& aux) {
  check_aux_shape(problem, aux);
  double total = 0.0;
  std::size_t iy = 0;
  std::size_t iyt = 0;
  for (const auto& t : problem.terms()) {
    const double A = std::max(t.numerator(x).value, 0.0);
    const double B = t.denominator(x).value;
    if (!(B > 0.0)) return -kInf;
    if (t.side == Side::Max) {
      const double y = aux.y[iy++];
      const double q = 2.0 * y * std::sqrt(A) - y * y * B;
      if (!t.outer.in_domain(q)) return -kInf;
      total += t.outer.evaluate(q);
    } else {
      const double yt = aux.y_tilde[iyt++];
      const ExtendedReal r = plus_part(2.0 * yt * std::sqrt(B) - yt * yt * A).reciprocal();
      if (r.is_infinite()) {
        total += t.outer.at_infinity();
      } else if (t.outer.in_domain(r.value())) {
        total += t.outer.evaluate(r.value());
      } else {
        return -kInf;
      }
    }
  }
  return total;
}

std::optional<ValueGrad> surrogate_value_grad(const MixedFpProblem& problem, const Vector& x,
                                              const AuxState& aux) {
  check_aux_shape(problem, aux);
  if (!problem.feasible().in_domain(x)) return std::nullopt;
  ValueGrad out{0.0, Vector::Zero(x.size())};
  std::size_t iy = 0;
  std::size_t iyt = 0;
  for (const auto& t : problem.terms()) {
    TermEval e = eval_term(t, x);
    const double A = std::max(e.A, 0.0);
    if (!(e.B > 0.0)) return std::nullopt;
    const double sqrtA = std::max(std::sqrt(A), kSqrtFloor);
    const double sqrtB = std::sqrt(e.B);
    if (t.side == Side::Max) {
      const double y = aux.y[iy++];
      const double q = 2.0 * y * std::sqrt(A) - y * y * e.B;
      if (!t.outer.in_domain(q)) return std::nullopt;
      out.value += t.outer.evaluate(q);
      const double fp = t.outer.derivative(q);
      if (y != 0.0) out.gradient += fp * ((y / sqrtA) * e.dA - (y * y) * e.dB);
    } else {
      const double yt = aux.y_tilde[iyt++];
      const double Q = 2.0 * yt * sqrtB - yt * yt * A;
      if (!(Q > 0.0)) return std::nullopt;
      const double r = 1.0 / Q;
      if (!std::isfinite(r) || !t.outer.in_domain(r)) return std::nullopt;
      out.value += t.outer.evaluate(r);
      const double fp = t.outer.derivative(r);
      out.gradient += (-fp / (Q * Q)) * ((yt / sqrtB) * e.dB - (yt * yt) * e.dA);
    }
  }
  if (!std::isfinite(out.value)) return std::nullopt;
  return out;
}

double mixed_surrogate(const MixedFpProblem& problem, const Vector& x, const Vector& anchor) {
  AuxState aux;
  for (const auto& t : problem.terms()) {
    const double A = std::max(t.numerator(anchor).value, 0.0);
    const double B = t.denominator(anchor).value;
    if (!(B > 0.0)) throw DomainError("mixed_surrogate: anchor has nonpositive denominator");
    if (t.side == Side::Max) {
      aux.y.push_back(opt_y(A, B));
    } else {
      aux.y_tilde.push_back(A > 0.0 ? std::sqrt(B) / A : opt_y_tilde(A, B));
    }
  }
  return surrogate_value(problem, x, aux);
}

}  // namespace fpkit
