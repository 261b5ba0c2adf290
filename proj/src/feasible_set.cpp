#include "fpkit/feasible_set.hpp"

#include <cmath>
#include <utility>

#include "fpkit/errors.hpp"

namespace fpkit {

Vector project_box(const Vector& x, const Vector& lo, const Vector& hi) {
  if (x.size() != lo.size() || x.size() != hi.size()) {
    throw InvalidInput("project_box: dimension mismatch");
  }
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (lo[i] > hi[i]) throw InvalidInput("project_box: lower bound exceeds upper bound");
    out[i] = std::min(std::max(x[i], lo[i]), hi[i]);
  }
  return out;
}

ComplexVector project_ball(const ComplexVector& x, double radius_sq) {
  if (!(radius_sq > 0.0)) throw InvalidInput("project_ball: radius_sq must be positive");
  const double norm_sq = x.squaredNorm();
  if (norm_sq <= radius_sq) return x;
  return x * (std::sqrt(radius_sq) / std::sqrt(norm_sq));
}

FeasibleSet::FeasibleSet(Projection project, DomainTest in_domain, std::size_t dimension)
    : project_(std::move(project)), in_domain_(std::move(in_domain)), dimension_(dimension) {}

FeasibleSet FeasibleSet::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw InvalidInput("box: bound dimension mismatch");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) throw InvalidInput("box: lower bound exceeds upper bound");
  }
  const auto n = static_cast<std::size_t>(lo.size());
  return FeasibleSet(
      [lo, hi](const Vector& x) { return project_box(x, lo, hi); },
      [](const Vector& x) { return x.allFinite(); }, n);
}

FeasibleSet FeasibleSet::ball_product(std::vector<std::size_t> block_sizes,
                                      std::vector<double> radii_sq) {
  if (block_sizes.size() != radii_sq.size()) {
    throw InvalidInput("ball_product: one radius per block required");
  }
  std::size_t n = 0;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    if (!(radii_sq[b] > 0.0)) throw InvalidInput("ball_product: radius_sq must be positive");
    n += 2 * block_sizes[b];
  }
  auto project = [block_sizes, radii_sq](const Vector& x) {
    Vector out = x;
    Eigen::Index offset = 0;
    for (std::size_t b = 0; b < block_sizes.size(); ++b) {
      const auto len = static_cast<Eigen::Index>(2 * block_sizes[b]);
      const double norm_sq = x.segment(offset, len).squaredNorm();
      if (norm_sq > radii_sq[b]) {
        out.segment(offset, len) *= std::sqrt(radii_sq[b]) / std::sqrt(norm_sq);
      }
      offset += len;
    }
    return out;
  };
  return FeasibleSet(std::move(project), [](const Vector& x) { return x.allFinite(); }, n);
}

FeasibleSet FeasibleSet::with_domain(DomainTest extra) const {
  auto base = in_domain_;
  return FeasibleSet(
      project_, [base, extra = std::move(extra)](const Vector& x) { return base(x) && extra(x); },
      dimension_);
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
  if (static_cast<std::size_t>(x.size()) != dimension_) return false;
  return (project(x) - x).lpNorm<Eigen::Infinity>() <= tol * (1.0 + x.lpNorm<Eigen::Infinity>());
}

Vector pack_complex(const std::vector<ComplexVector>& blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += 2 * b.size();
  Vector x(n);
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    x.segment(offset, b.size()) = b.real();
    x.segment(offset + b.size(), b.size()) = b.imag();
    offset += 2 * b.size();
  }
  return x;
}

std::vector<ComplexVector> unpack_complex(const Vector& x,
                                          const std::vector<std::size_t>& block_sizes) {
  std::vector<ComplexVector> blocks;
  blocks.reserve(block_sizes.size());
  Eigen::Index offset = 0;
  for (std::size_t sz : block_sizes) {
    const auto n = static_cast<Eigen::Index>(sz);
    if (offset + 2 * n > x.size()) throw InvalidInput("unpack_complex: vector too short");
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = {x[offset + i], x[offset + n + i]};
    blocks.push_back(std::move(v));
    offset += 2 * n;
  }
  if (offset != x.size()) throw InvalidInput("unpack_complex: vector too long");
  return blocks;
}

}  // namespace fpkit
