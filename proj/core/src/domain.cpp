#include "bergman/domain.hpp"

#include <cmath>

#include "bergman/errors.hpp"

namespace bergman {

Complex QuadratureRule::integrate(
    const std::function<Complex(const CVector&)>& f) const {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
  return acc;
}

double QuadratureRule::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double DomainDescriptor::box_volume() const {
  double v = 1.0;
  for (const auto& [lo, hi] : box) v *= hi - lo;
  return v;
}

CVector DomainDescriptor::draw_box_point(Rng& rng) const {
  CVector z(dim);
  for (int i = 0; i < dim; ++i) {
    const double re = rng.uniform(box[2 * i].first, box[2 * i].second);
    const double im = rng.uniform(box[2 * i + 1].first, box[2 * i + 1].second);
    z[i] = Complex(re, im);
  }
  return z;
}

std::vector<CVector> sample_points(const DomainDescriptor& dom,
                                   std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CVector> out;
  out.reserve(count);
  std::size_t rejected = 0;
  while (out.size() < count) {
    CVector z = dom.draw_box_point(rng);
    if (dom.contains(z)) {
      out.push_back(std::move(z));
    } else if (++rejected > 10000 * (count + 1)) {
      throw SamplingError("sample_points: acceptance stalled on " + dom.name);
    }
  }
  return out;
}

CVector sample_one(const DomainDescriptor& dom, std::uint64_t seed) {
  return sample_points(dom, 1, seed)[0];
}

namespace quadrature {

void gauss_legendre(int m, double a, double b, std::vector<double>& x,
                    std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton on P_m from the Chebyshev-like initial guess
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= m; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = m * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    const double xm = 0.5 * (b + a);
    const double xl = 0.5 * (b - a);
    x[static_cast<std::size_t>(i)] = xm - xl * z;
    x[static_cast<std::size_t>(m - 1 - i)] = xm + xl * z;
    const double wi = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(m - 1 - i)] = wi;
  }
}

namespace {

// Disk rule in (t, theta), z = sqrt(t) e^{i theta}; radial_nodes GL points in
// t and an even midpoint-offset angular grid, so no node has Im z = 0,
// Re z = 0 or z = 0.
struct DiskGrid {
  std::vector<double> t, wt;
  int m_ang;
};

DiskGrid disk_grid(int radial_nodes, int degree) {
  DiskGrid g;
  gauss_legendre(radial_nodes, 0.0, 1.0, g.t, g.wt);
  int m = 2 * degree + 2;
  if (m % 2) ++m;
  g.m_ang = std::max(m, 4);
  return g;
}

void ball_rule_rec(int n, int degree, const CVector& partial, double scale,
                   double weight, QuadratureRule& out) {
  // Integrates over the ball of radius `scale` in the last n coordinates of
  // `partial`'s tail; recursion peels one disk factor at a time.
  const DiskGrid g = disk_grid(degree + n + 1, degree);
  const double dtheta = 2.0 * kPi / g.m_ang;
  for (std::size_t j = 0; j < g.t.size(); ++j) {
    const double r = std::sqrt(g.t[j]);
    const double wr = 0.5 * g.wt[j] * dtheta * scale * scale;
    for (int k = 0; k < g.m_ang; ++k) {
      const double theta = dtheta * (k + 0.5);
      const Complex zn = scale * r * Complex(std::cos(theta), std::sin(theta));
      CVector z = partial;
      z[z.size() - n] = zn;
      if (n == 1) {
        out.nodes.push_back(z);
        out.weights.push_back(weight * wr);
      } else {
        const double sub_scale = scale * std::sqrt(1.0 - g.t[j]);
        ball_rule_rec(n - 1, degree, z, sub_scale, weight * wr, out);
      }
    }
  }
}

}  // namespace

QuadratureRule ball_rule(int n, int degree) {
  QuadratureRule rule;
  rule.tag = "ball-polar n=" + std::to_string(n) + " d=" + std::to_string(degree);
  CVector zero = CVector::Zero(n);
  ball_rule_rec(n, degree, zero, 1.0, 1.0, rule);
  return rule;
}

QuadratureRule annulus_rule(double inner_radius, int degree) {
  if (inner_radius <= 0.0 || inner_radius >= 1.0)
    throw ParameterError("annulus_rule: inner radius must be in (0,1)");
  QuadratureRule rule;
  rule.tag = "annulus-polar r=" + std::to_string(inner_radius);
  const int m_rad = std::max(40, 2 * degree + 10);
  std::vector<double> t, wt;
  gauss_legendre(m_rad, inner_radius * inner_radius, 1.0, t, wt);
  int m_ang = 4 * degree + 2;
  if (m_ang % 2) ++m_ang;
  m_ang = std::max(m_ang, 8);
  const double dtheta = 2.0 * kPi / m_ang;
  for (int j = 0; j < m_rad; ++j) {
    const double r = std::sqrt(t[static_cast<std::size_t>(j)]);
    const double w = 0.5 * wt[static_cast<std::size_t>(j)] * dtheta;
    for (int k = 0; k < m_ang; ++k) {
      const double theta = dtheta * (k + 0.5);
      CVector z(1);
      z[0] = r * Complex(std::cos(theta), std::sin(theta));
      rule.nodes.push_back(z);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

QuadratureRule box_masked_rule(const DomainDescriptor& dom, int points_per_dim) {
  QuadratureRule rule;
  rule.tag = "box-masked m=" + std::to_string(points_per_dim);
  const int d2 = 2 * dom.dim;
  std::vector<std::vector<double>> xs(static_cast<std::size_t>(d2)),
      ws(static_cast<std::size_t>(d2));
  for (int a = 0; a < d2; ++a)
    gauss_legendre(points_per_dim, dom.box[static_cast<std::size_t>(a)].first,
                   dom.box[static_cast<std::size_t>(a)].second,
                   xs[static_cast<std::size_t>(a)], ws[static_cast<std::size_t>(a)]);
  std::vector<int> idx(static_cast<std::size_t>(d2), 0);
  while (true) {
    CVector z(dom.dim);
    double w = 1.0;
    for (int i = 0; i < dom.dim; ++i) {
      const auto re_i = static_cast<std::size_t>(2 * i);
      const auto im_i = static_cast<std::size_t>(2 * i + 1);
      z[i] = Complex(xs[re_i][static_cast<std::size_t>(idx[re_i])],
                     xs[im_i][static_cast<std::size_t>(idx[im_i])]);
      w *= ws[re_i][static_cast<std::size_t>(idx[re_i])] *
           ws[im_i][static_cast<std::size_t>(idx[im_i])];
    }
    if (dom.contains(z)) {
      rule.nodes.push_back(std::move(z));
      rule.weights.push_back(w);
    }
    int a = 0;
    for (; a < d2; ++a) {
      if (++idx[static_cast<std::size_t>(a)] < points_per_dim) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
    if (a == d2) break;
  }
  return rule;
}

}  // namespace quadrature

namespace domains {

namespace {
std::vector<std::pair<double, double>> centered_box(const CVector& center,
                                                    double radius) {
  std::vector<std::pair<double, double>> box;
  for (Eigen::Index i = 0; i < center.size(); ++i) {
    box.emplace_back(center[i].real() - radius, center[i].real() + radius);
    box.emplace_back(center[i].imag() - radius, center[i].imag() + radius);
  }
  return box;
}

QuadratureRule affine_ball_rule(int n, int degree, const CVector& center,
                                double radius) {
  QuadratureRule rule = quadrature::ball_rule(n, degree);
  const double jac = std::pow(radius, 2 * n);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] = center + radius * rule.nodes[i];
    rule.weights[i] *= jac;
  }
  rule.tag += " r=" + std::to_string(radius);
  return rule;
}
}  // namespace

DomainDescriptor ball(int n, double radius, std::optional<CVector> center) {
  if (n < 1) throw ParameterError("ball: n must be >= 1");
  if (radius <= 0.0) throw ParameterError("ball: radius must be positive");
  CVector c = center.value_or(CVector::Zero(n));
  DomainDescriptor d;
  d.dim = n;
  d.name = "ball-n" + std::to_string(n) +
           (radius != 1.0 ? "-r" + std::to_string(radius) : "");
  d.bounding_radius = c.norm() + radius;
  d.box = centered_box(c, radius);
  d.contains = [c, radius](const CVector& z) { return (z - c).norm() < radius; };
  d.clearance = [c, radius](const CVector& z) {
    return std::max(0.0, radius - (z - c).norm());
  };
  d.quadrature = [n, c, radius](int degree) {
    return affine_ball_rule(n, degree, c, radius);
  };
  return d;
}

DomainDescriptor slit_ball(int n) {
  if (n < 2) throw ParameterError("slit_ball: needs n >= 2");
  DomainDescriptor d = ball(n);
  d.name = "slit-ball-n" + std::to_string(n);
  d.contains = [n](const CVector& z) {
    return z.norm() < 1.0 && z[n - 1] != Complex(0.0, 0.0);
  };
  d.clearance = [n](const CVector& z) {
    return std::max(0.0, std::min(1.0 - z.norm(), std::abs(z[n - 1])));
  };
  // the ball rule never places a node on {z_n = 0}
  return d;
}

DomainDescriptor hartogs_removed_ball(int n, double eps) {
  if (n < 2) throw ParameterError("hartogs_removed_ball: needs n >= 2");
  if (eps <= 0.0) throw ParameterError("hartogs_removed_ball: eps must be > 0");
  DomainDescriptor d = ball(n);
  d.name = "hartogs-removed-ball-n" + std::to_string(n);
  const double sqrt_eps = std::sqrt(eps);
  auto in_removed = [n, eps](const CVector& z) {
    if (z[n - 1].imag() != 0.0) return false;
    double s = z[n - 1].real() * z[n - 1].real();
    for (int i = 0; i + 1 < n; ++i) s += std::norm(z[i]);
    return s <= eps;
  };
  d.contains = [d0 = d.contains, in_removed](const CVector& z) {
    return d0(z) && !in_removed(z);
  };
  d.clearance = [n, sqrt_eps](const CVector& z) {
    double in_plane = z[n - 1].real() * z[n - 1].real();
    for (int i = 0; i + 1 < n; ++i) in_plane += std::norm(z[i]);
    in_plane = std::sqrt(in_plane);
    const double y = std::abs(z[n - 1].imag());
    const double to_removed =
        in_plane <= sqrt_eps ? y : std::hypot(y, in_plane - sqrt_eps);
    return std::max(0.0, std::min(1.0 - z.norm(), to_removed));
  };
  // ball-rule nodes all have Im z_n != 0, so none lies in the removed set
  return d;
}

DomainDescriptor blowdown_image(int n) {
  if (n < 2) throw ParameterError("blowdown_image: needs n >= 2");
  DomainDescriptor d;
  d.dim = n;
  d.name = "blowdown-image-n" + std::to_string(n);
  d.bounding_radius = std::sqrt(1.25);
  for (int i = 0; i + 1 < n; ++i) {
    d.box.emplace_back(-0.5, 0.5);
    d.box.emplace_back(-0.5, 0.5);
  }
  d.box.emplace_back(-1.0, 1.0);
  d.box.emplace_back(-1.0, 1.0);
  auto defect = [n](const CVector& z) {
    double s = 0.0;
    for (int i = 0; i + 1 < n; ++i) s += std::norm(z[i]);
    const double t = std::norm(z[n - 1]);
    return s + t * (t - 1.0);
  };
  d.contains = [defect](const CVector& z) { return defect(z) < 0.0; };
  d.clearance = [defect, n](const CVector& z) {
    const double b = defect(z);
    if (b >= 0.0) return 0.0;
    // |grad| of the defining function stays below ~4 on the bounding box
    return std::min({-b / 4.0, std::abs(z[n - 1]) / 2.0,
                     (1.0 - std::abs(z[n - 1])) / 2.0});
  };
  return d;
}

DomainDescriptor ellipsoid(const HermitianForm& h) {
  const int n = h.dim();
  DomainDescriptor d;
  d.dim = n;
  d.name = "ellipsoid-n" + std::to_string(n);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  const double lam_min = es.eigenvalues().minCoeff();
  const double lam_max = es.eigenvalues().maxCoeff();
  if (lam_min <= 0.0)
    throw DefinitenessError(0, "ellipsoid: form not positive definite");
  d.bounding_radius = std::sqrt((n + 1.0) / lam_min);
  d.box = centered_box(CVector::Zero(n), d.bounding_radius);
  const CMatrix hm = h.matrix();
  d.contains = [hm, n](const CVector& z) {
    return (z.transpose() * hm * z.conjugate())(0).real() < n + 1.0;
  };
  // distance bound via the linear change of variables onto the unit ball
  const CMatrix a = hermitian_sqrt(hm);
  const CMatrix to_ball = a.transpose() / std::sqrt(n + 1.0);
  const double sigma_max = std::sqrt(lam_max / (n + 1.0));
  d.clearance = [to_ball, sigma_max](const CVector& z) {
    const double r = (to_ball * z).norm();
    return std::max(0.0, (1.0 - r) / sigma_max);
  };
  const CMatrix from_ball = to_ball.inverse();
  const double jac = std::pow(n + 1.0, n) / hm.determinant().real();
  d.quadrature = [n, from_ball, jac](int degree) {
    QuadratureRule rule = quadrature::ball_rule(n, degree);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      rule.nodes[i] = from_ball * rule.nodes[i];
      rule.weights[i] *= jac;
    }
    rule.tag = "ellipsoid-mapped " + rule.tag;
    return rule;
  };
  return d;
}

DomainDescriptor annulus(double inner_radius) {
  if (inner_radius <= 0.0 || inner_radius >= 1.0)
    throw ParameterError("annulus: inner radius must be in (0,1)");
  DomainDescriptor d;
  d.dim = 1;
  d.name = "annulus-r" + std::to_string(inner_radius);
  d.bounding_radius = 1.0;
  d.box = centered_box(CVector::Zero(1), 1.0);
  d.contains = [inner_radius](const CVector& z) {
    const double r = std::abs(z[0]);
    return r > inner_radius && r < 1.0;
  };
  d.clearance = [inner_radius](const CVector& z) {
    const double r = std::abs(z[0]);
    return std::max(0.0, std::min(r - inner_radius, 1.0 - r));
  };
  d.quadrature = [inner_radius](int degree) {
    return quadrature::annulus_rule(inner_radius, degree);
  };
  return d;
}

DomainDescriptor unitary_image(const DomainDescriptor& dom, const CMatrix& u) {
  DomainDescriptor d;
  d.dim = dom.dim;
  d.name = dom.name + "-rotated";
  d.bounding_radius = dom.bounding_radius;
  d.box = centered_box(CVector::Zero(dom.dim), dom.bounding_radius);
  const CMatrix u_inv = u.adjoint();
  d.contains = [c = dom.contains, u_inv](const CVector& z) {
    return c(u_inv * z);
  };
  d.clearance = [c = dom.clearance, u_inv](const CVector& z) {
    return c(u_inv * z);
  };
  if (dom.quadrature) {
    d.quadrature = [q = dom.quadrature, u](int degree) {
      QuadratureRule rule = q(degree);
      for (auto& node : rule.nodes) node = u * node;
      rule.tag += " rotated";
      return rule;
    };
  }
  return d;
}

}  // namespace domains

}  // namespace bergman
