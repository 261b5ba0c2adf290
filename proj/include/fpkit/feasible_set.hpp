#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace fpkit {

using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Componentwise clamp of x into [lo, hi]. Throws InvalidInput if lo > hi anywhere.
Vector project_box(const Vector& x, const Vector& lo, const Vector& hi);

/// Radial projection onto {v : |v|^2 <= radius_sq}.
ComplexVector project_ball(const ComplexVector& x, double radius_sq);

/// A closed convex constraint set plus an open-domain guard.
///
/// `project` maps any point to its Euclidean projection onto the closed set.
/// `in_domain` is the open-domain predicate (e.g. strict positivity of a
/// denominator); the line search never accepts a point for which it is false.
class FeasibleSet {
 public:
  using Projection = std::function<Vector(const Vector&)>;
  using DomainTest = std::function<bool(const Vector&)>;

  FeasibleSet(Projection project, DomainTest in_domain, std::size_t dimension);

  static FeasibleSet box(Vector lo, Vector hi);

  /// Product of complex balls. Block b occupies 2*block_sizes[b] consecutive
  /// real coordinates laid out as [Re(v_b); Im(v_b)].
  static FeasibleSet ball_product(std::vector<std::size_t> block_sizes,
                                  std::vector<double> radii_sq);

  /// Same closed set, with an extra open-domain predicate ANDed in.
  FeasibleSet with_domain(DomainTest extra) const;

  Vector project(const Vector& x) const { return project_(x); }
  bool in_domain(const Vector& x) const { return in_domain_(x); }
  bool contains(const Vector& x, double tol = 1e-12) const;
  std::size_t dimension() const noexcept { return dimension_; }

 private:
  Projection project_;
  DomainTest in_domain_;
  std::size_t dimension_;
};

/// Real coordinatization helpers for stacked complex blocks.
Vector pack_complex(const std::vector<ComplexVector>& blocks);
std::vector<ComplexVector> unpack_complex(const Vector& x,
                                          const std::vector<std::size_t>& block_sizes);

}  // namespace fpkit
