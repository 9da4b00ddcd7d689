#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bergman/hermitian.hpp"
#include "bergman/rng.hpp"
#include "bergman/types.hpp"

namespace bergman {

/// Nodes and weights realizing Lebesgue measure m_{2n} on a bounded domain.
struct QuadratureRule {
  std::vector<CVector> nodes;
  std::vector<double> weights;
  std::string tag;

  Complex integrate(const std::function<Complex(const CVector&)>& f) const;
  double total_weight() const;
};

/// Bounded domain in C^n: membership test, box-rejection sampler and, where
/// an exact construction exists, a quadrature factory. Immutable and
/// shareable across threads.
class DomainDescriptor {
 public:
  int dim = 0;
  std::string name;
  /// Every member has ||z|| < bounding_radius.
  double bounding_radius = 0.0;
  /// Sampling box, 2*dim real intervals: re z_1, im z_1, re z_2, ...
  std::vector<std::pair<double, double>> box;
  std::function<bool(const CVector&)> contains;
  /// Lower bound for the distance from z to the complement; used to size
  /// derivative stencils. Zero outside the domain.
  std::function<double(const CVector&)> clearance;
  /// Present when an exact rule is known (balls, ellipsoids, annulus).
  /// The rule integrates monomials w^a conj(w)^b with |a|,|b| <= degree
  /// exactly; removed sets of measure zero never contain a node.
  std::function<QuadratureRule(int degree)> quadrature;

  double box_volume() const;
  /// One uniform candidate in the box (not necessarily in the domain).
  CVector draw_box_point(Rng& rng) const;
};

/// Uniform points of the domain, rejection-filtered from the box.
/// Deterministic given the seed; throws SamplingError if acceptance stalls.
std::vector<CVector> sample_points(const DomainDescriptor& dom,
                                   std::size_t count, std::uint64_t seed);
CVector sample_one(const DomainDescriptor& dom, std::uint64_t seed);

namespace domains {

/// Ball B^n(center, radius); defaults to the unit ball.
DomainDescriptor ball(int n, double radius = 1.0,
                      std::optional<CVector> center = std::nullopt);

/// B^n minus the hyperplane slice {z_n = 0}.
DomainDescriptor slit_ball(int n);

/// B^n minus the compact Hausdorff-codimension-one set
/// {|z'|^2 + (Re z_n)^2 <= eps, Im z_n = 0}.
DomainDescriptor hartogs_removed_ball(int n, double eps);

/// { |z'|^2 + |z_n|^2 (|z_n|^2 - 1) < 0 }, the image of the slit ball
/// under (z', z_n) -> (z' z_n, z_n).
DomainDescriptor blowdown_image(int n);

/// Complex ellipsoid E_H = { zeta : zeta H zeta^* < n+1 }.
DomainDescriptor ellipsoid(const HermitianForm& h);

/// Annulus r < |z| < 1 in C. Negative control: not simply connected.
DomainDescriptor annulus(double inner_radius);

/// Image U(dom) of a domain under a unitary map.
DomainDescriptor unitary_image(const DomainDescriptor& dom, const CMatrix& u);

}  // namespace domains

namespace quadrature {

/// Gauss-Legendre nodes/weights on [a,b].
void gauss_legendre(int m, double a, double b, std::vector<double>& x,
                    std::vector<double>& w);

/// Exact rule for the unit ball in C^n (polar radial Gauss-Legendre times
/// midpoint angular grids; no node on {z_j = 0} or {Im z_j = 0}).
QuadratureRule ball_rule(int n, int degree);

/// Exact-to-roundoff rule for the annulus r < |z| < 1 covering Laurent
/// exponents |k| <= degree.
QuadratureRule annulus_rule(double inner_radius, int degree);

/// Membership-masked product Gauss-Legendre rule over the bounding box.
/// Not exact; the C^0 mask limits accuracy. points_per_dim per real axis.
QuadratureRule box_masked_rule(const DomainDescriptor& dom, int points_per_dim);

}  // namespace quadrature

}  // namespace bergman
