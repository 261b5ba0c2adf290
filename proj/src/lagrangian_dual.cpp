#include "fpkit/lagrangian_dual.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "fpkit/errors.hpp"

namespace fpkit {

namespace {

void check_inputs(const char* op, double A, double B) {
  if (!(A >= 0.0) || !std::isfinite(A)) {
    throw InvalidInput(std::string(op) + ": numerator must be finite and nonnegative");
  }
  if (!(B > 0.0) || !std::isfinite(B)) {
    throw InvalidInput(std::string(op) + ": denominator must be finite and positive");
  }
}

void check_weight(double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("weight must be finite and nonnegative");
}

}  // namespace

double opt_gamma(double A, double B) {
  check_inputs("opt_gamma", A, B);
  return A / B;
}

double opt_gamma_tilde(double A, double B) {
  check_inputs("opt_gamma_tilde", A, B);
  return std::min(A / (A + B), kGammaTildeCap);
}

double zeta_plus(double w, double gamma, double A, double B) {
  check_weight(w);
  check_inputs("zeta_plus", A, B);
  if (!(gamma >= 0.0)) throw InvalidInput("zeta_plus: gamma must be nonnegative");
  return w * std::log1p(gamma) - w * gamma + w * (1.0 + gamma) * A / (A + B);
}

double zeta_minus(double w, double gamma_tilde, double A, double B) {
  check_weight(w);
  check_inputs("zeta_minus", A, B);
  if (!(gamma_tilde < 1.0)) throw DomainError("zeta_minus: gamma~ must be below 1");
  if (!(gamma_tilde >= 0.0)) throw InvalidInput("zeta_minus: gamma~ must be nonnegative");
  return w * std::log1p(-gamma_tilde) + w * gamma_tilde - w * (1.0 - gamma_tilde) * A / B;
}

double log_ratio_objective(const std::vector<LogRatioTerm>& terms, const Vector& x) {
  double total = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    if (t.weight == 0.0) continue;
    const double A = t.numerator(x).value;
    const double B = t.denominator(x).value;
    if (!(B > 0.0)) throw DomainError("log_ratio_objective: nonpositive denominator", i);
    const double v = t.weight * std::log1p(A / B);
    total += t.side == Side::Max ? v : -v;
  }
  return total;
}

GammaState compute_gammas(const std::vector<LogRatioTerm>& terms, const Vector& anchor) {
  GammaState g;
  for (const auto& t : terms) {
    check_weight(t.weight);
    const double A = std::max(t.numerator(anchor).value, 0.0);
    const double B = t.denominator(anchor).value;
    if (t.side == Side::Max) {
      g.gamma.push_back(opt_gamma(A, B));
    } else {
      g.gamma_tilde.push_back(opt_gamma_tilde(A, B));
    }
  }
  return g;
}

namespace {

std::size_t count_side(const std::vector<LogRatioTerm>& terms, Side side) {
  return static_cast<std::size_t>(
      std::count_if(terms.begin(), terms.end(), [side](const auto& t) { return t.side == side; }));
}

void check_gamma_shape(const std::vector<LogRatioTerm>& terms, const GammaState& g) {
  if (g.gamma.size() != count_side(terms, Side::Max) ||
      g.gamma_tilde.size() != count_side(terms, Side::Min)) {
    throw InvalidInput("gamma state does not match the term partition");
  }
}

}  // namespace

double lagrangian_value(const std::vector<LogRatioTerm>& terms, const Vector& x,
                        const GammaState& gammas) {
  check_gamma_shape(terms, gammas);
  double total = 0.0;
  std::size_t ig = 0;
  std::size_t igt = 0;
  for (const auto& t : terms) {
    const double A = std::max(t.numerator(x).value, 0.0);
    const double B = t.denominator(x).value;
    if (t.side == Side::Max) {
      const double g = gammas.gamma[ig++];
      if (t.weight != 0.0) total += zeta_plus(t.weight, g, A, B);
    } else {
      const double g = gammas.gamma_tilde[igt++];
      if (t.weight != 0.0) total += zeta_minus(t.weight, g, A, B);
    }
  }
  return total;
}

double log_ratio_surrogate(const std::vector<LogRatioTerm>& terms, const Vector& x,
                           const Vector& anchor) {
  return lagrangian_value(terms, x, compute_gammas(terms, anchor));
}

SumOfRatiosForm to_sum_of_ratios(const std::vector<LogRatioTerm>& terms, const GammaState& gammas,
                                 const FeasibleSet& feasible) {
  check_gamma_shape(terms, gammas);
  std::vector<RatioTerm> ratios;
  double constant = 0.0;
  std::size_t ig = 0;
  std::size_t igt = 0;
  for (const auto& t : terms) {
    if (t.side == Side::Max) {
      const double g = gammas.gamma[ig++];
      if (t.weight == 0.0) continue;
      constant += t.weight * std::log1p(g) - t.weight * g;
      const double scale = t.weight * (1.0 + g);
      SmoothFn num = [f = t.numerator, scale](const Vector& x) {
        ValueGrad a = f(x);
        a.value *= scale;
        a.gradient *= scale;
        return a;
      };
      SmoothFn den = [fa = t.numerator, fb = t.denominator](const Vector& x) {
        ValueGrad a = fa(x);
        ValueGrad b = fb(x);
        return ValueGrad{a.value + b.value, a.gradient + b.gradient};
      };
      ratios.emplace_back(std::move(num), std::move(den), OuterFunction::identity(1.0), Side::Max);
    } else {
      const double g = gammas.gamma_tilde[igt++];
      if (t.weight == 0.0) continue;
      if (!(g < 1.0)) throw DomainError("to_sum_of_ratios: gamma~ must be below 1");
      constant += t.weight * std::log1p(-g) + t.weight * g;
      const double scale = t.weight * (1.0 - g);
      SmoothFn num = [f = t.numerator, scale](const Vector& x) {
        ValueGrad a = f(x);
        a.value *= scale;
        a.gradient *= scale;
        return a;
      };
      ratios.emplace_back(std::move(num), t.denominator, OuterFunction::neg_identity(1.0),
                          Side::Min);
    }
  }
  if (ratios.empty()) throw InvalidInput("to_sum_of_ratios: every term has zero weight");
  return {MixedFpProblem(std::move(ratios), feasible), constant};
}

}  // namespace fpkit
