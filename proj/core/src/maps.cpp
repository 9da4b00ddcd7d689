#include "bergman/maps.hpp"

#include <cmath>

#include "bergman/deriv.hpp"
#include "bergman/errors.hpp"
#include "bergman/rng.hpp"

namespace bergman::maps {

HolomorphicMap identity(int n) {
  HolomorphicMap m;
  m.dim = n;
  m.name = "identity";
  m.eval = [](const CVector& z) { return z; };
  m.jacobian = [n](const CVector&) { return CMatrix::Identity(n, n); };
  return m;
}

HolomorphicMap unitary(const CMatrix& u) {
  const int n = static_cast<int>(u.rows());
  if (u.rows() != u.cols() ||
      max_abs(u.adjoint() * u - CMatrix::Identity(n, n)) > 1e-12)
    throw ParameterError("unitary: matrix is not unitary to 1e-12");
  HolomorphicMap m;
  m.dim = n;
  m.name = "unitary";
  m.eval = [u](const CVector& z) -> CVector { return u * z; };
  m.jacobian = [u](const CVector&) { return u; };
  return m;
}

CMatrix haar_unitary(int n, std::uint64_t seed) {
  Rng rng(seed);
  CMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

HolomorphicMap disc_mobius_lift(Complex a) {
  if (std::abs(a) >= 1.0)
    throw ParameterError("disc_mobius_lift: requires |a| < 1");
  HolomorphicMap m;
  m.dim = 2;
  m.name = "disc-mobius-lift";
  m.source = domains::ball(2);
  m.target = domains::ball(2);
  const double s = std::sqrt(1.0 - std::norm(a));
  const Complex ab = std::conj(a);
  m.eval = [a, ab, s](const CVector& z) {
    const Complex d = 1.0 - ab * z[0];
    CVector w(2);
    w[0] = (a - z[0]) / d;
    w[1] = s * z[1] / d;
    return w;
  };
  m.jacobian = [a, ab, s](const CVector& z) {
    const Complex d = 1.0 - ab * z[0];
    CMatrix j(2, 2);
    j(0, 0) = (std::norm(a) - 1.0) / (d * d);
    j(0, 1) = 0.0;
    j(1, 0) = s * z[1] * ab / (d * d);
    j(1, 1) = s / d;
    return j;
  };
  return m;
}

HolomorphicMap blowdown(int n) {
  if (n < 2) throw ParameterError("blowdown: needs n >= 2");
  HolomorphicMap m;
  m.dim = n;
  m.name = "blowdown";
  m.source = domains::slit_ball(n);
  m.target = domains::blowdown_image(n);
  m.eval = [n](const CVector& z) {
    CVector w(n);
    for (int i = 0; i + 1 < n; ++i) w[i] = z[i] * z[n - 1];
    w[n - 1] = z[n - 1];
    return w;
  };
  m.jacobian = [n](const CVector& z) {
    CMatrix j = CMatrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
      j(i, i) = z[n - 1];
      j(i, n - 1) = z[i];
    }
    j(n - 1, n - 1) = 1.0;
    return j;
  };
  return m;
}

HolomorphicMap blowdown_inverse(int n) {
  if (n < 2) throw ParameterError("blowdown_inverse: needs n >= 2");
  HolomorphicMap m;
  m.dim = n;
  m.name = "blowdown-inverse";
  m.source = domains::blowdown_image(n);
  m.target = domains::slit_ball(n);
  m.eval = [n](const CVector& w) {
    if (w[n - 1] == Complex(0.0, 0.0))
      throw DomainError("blowdown_inverse: last coordinate vanishes");
    CVector z(n);
    for (int i = 0; i + 1 < n; ++i) z[i] = w[i] / w[n - 1];
    z[n - 1] = w[n - 1];
    return z;
  };
  m.jacobian = [n](const CVector& w) {
    if (w[n - 1] == Complex(0.0, 0.0))
      throw DomainError("blowdown_inverse: last coordinate vanishes");
    CMatrix j = CMatrix::Zero(n, n);
    const Complex inv = 1.0 / w[n - 1];
    for (int i = 0; i + 1 < n; ++i) {
      j(i, i) = inv;
      j(i, n - 1) = -w[i] * inv * inv;
    }
    j(n - 1, n - 1) = 1.0;
    return j;
  };
  return m;
}

JacobianRootLift jacobian_root_lift(int n, Complex a) {
  if (n != 2 && n != 3)
    throw ParameterError("jacobian_root_lift: supported for n = 2 and 3");
  if (std::abs(a) >= 1.0)
    throw ParameterError("jacobian_root_lift: requires |a| < 1");
  const Complex ab = std::conj(a);
  // T(z') = c (1 - conj(a) z'_1)^{-n}; c < 0 real, nonvanishing on the ball
  const double c = (n == 2) ? std::norm(a) - 1.0
                            : (std::norm(a) - 1.0) * std::sqrt(1.0 - std::norm(a));
  if (c == 0.0) throw ParameterError("jacobian_root_lift: degenerate base map");
  // principal n-th root of the negative real constant
  const Complex root_c =
      std::exp((std::log(std::abs(c)) + Complex(0.0, kPi)) / double(n));

  JacobianRootLift lift;
  lift.n = n;
  if (n == 2) {
    lift.base_map = [a, ab](const CVector& zp) {
      CVector w(1);
      w[0] = (a - zp[0]) / (1.0 - ab * zp[0]);
      return w;
    };
  } else {
    const HolomorphicMap base = disc_mobius_lift(a);
    lift.base_map = [base](const CVector& zp) { return base.eval(zp); };
  }
  lift.base_jacobian_det = [c, ab, n](const CVector& zp) {
    const Complex d = 1.0 - ab * zp[0];
    Complex dn = 1.0;
    for (int i = 0; i < n; ++i) dn *= d;
    return c / dn;
  };

  HolomorphicMap m;
  m.dim = n;
  m.name = "jacobian-root-lift";
  m.source = domains::ball(n);
  m.target = domains::ball(n);
  auto base_map = lift.base_map;
  m.eval = [base_map, root_c, ab, n](const CVector& z) {
    const CVector zp = z.head(n - 1);
    const CVector az = base_map(zp);
    CVector w(n);
    w.head(n - 1) = az;
    w[n - 1] = root_c / (1.0 - ab * z[0]) * z[n - 1];  // T^{1/n} z_n
    return w;
  };
  const Complex avalue = a;
  m.jacobian = [avalue, ab, root_c, n](const CVector& z) {
    const Complex d = 1.0 - ab * z[0];
    CMatrix j = CMatrix::Zero(n, n);
    if (n == 2) {
      j(0, 0) = (std::norm(avalue) - 1.0) / (d * d);
    } else {
      const HolomorphicMap base = disc_mobius_lift(avalue);
      j.topLeftCorner(2, 2) = base.jacobian(z.head(2));
    }
    j(n - 1, 0) = root_c * ab / (d * d) * z[n - 1];
    j(n - 1, n - 1) = root_c / d;
    return j;
  };
  lift.map = std::move(m);
  return lift;
}

JacobianRootLift jacobian_root_lift_identity(int n) {
  if (n < 2) throw ParameterError("jacobian_root_lift_identity: needs n >= 2");
  JacobianRootLift lift;
  lift.n = n;
  lift.base_map = [](const CVector& zp) { return zp; };
  lift.base_jacobian_det = [](const CVector&) { return Complex(1.0, 0.0); };
  lift.map = identity(n);
  lift.map.source = domains::ball(n);
  lift.map.target = domains::ball(n);
  return lift;
}

HolomorphicMap ellipsoid_normalizer(const HermitianForm& h) {
  const int n = h.dim();
  const CMatrix a = hermitian_sqrt(h);
  const CMatrix m_lin = a.transpose() / std::sqrt(n + 1.0);
  HolomorphicMap m;
  m.dim = n;
  m.name = "ellipsoid-normalizer";
  m.source = domains::ellipsoid(h);
  m.target = domains::ball(n);
  m.eval = [m_lin](const CVector& z) -> CVector { return m_lin * z; };
  m.jacobian = [m_lin](const CVector&) { return m_lin; };
  return m;
}

namespace {

struct RepCoordsState {
  KernelPtr kernel;
  CVector p, p_bar;
  CMatrix coeff;    // conj((g_{i jbar}(p))^{-1})
  CVector diag_grad;  // u-side gradient of log K~ at (p, pbar)
  double step;
  int circle_points;
};

CVector u_side_gradient(const Kernel& k, const CVector& z, const CVector& u0,
                        double step, int circle_points) {
  const int n = k.dim();
  const Complex k0 = k.eval_polarized(z, u0);
  const double scale =
      std::sqrt(std::max(k.diagonal(z), 0.0) *
                std::max(k.diagonal(u0.conjugate()), 0.0));
  if (!(std::abs(k0) > 1e-12 * std::max(scale, 1e-300))) {
    throw ZeroDivisorError(
        "representative_coordinates: K(z,p) vanishes at the requested point");
  }
  const Complex log_k0 = std::log(k0);
  deriv::PolarizedFn f = [&k, k0, log_k0](const CVector& zz, const CVector& uu) {
    const Complex v = k.eval_polarized(zz, uu) / k0;
    if (v == Complex(0.0, 0.0) || !std::isfinite(v.real()))
      throw GeometryError("representative_coordinates: kernel vanished on a "
                          "derivative stencil; reduce the step");
    return log_k0 + std::log(v);
  };
  CVector grad(n);
  deriv::Options opt;
  opt.circle_points = circle_points;
  for (int j = 0; j < n; ++j) {
    deriv::Var v;
    v.hol = false;
    v.dir = CVector::Zero(n);
    v.dir[j] = 1.0;
    v.order = 1;
    grad[j] = deriv::mixed_derivative(f, z, u0, {v}, step, opt);
  }
  return grad;
}

}  // namespace

CVector representative_coordinates(const Kernel& k, const CVector& p,
                                   const CVector& z, const DerivConfig& cfg) {
  return representative_map(
             std::shared_ptr<const Kernel>(&k, [](const Kernel*) {}), p, cfg)
      .eval(z);
}

HolomorphicMap representative_map(KernelPtr k, const CVector& p,
                                  const DerivConfig& cfg) {
  auto state = std::make_shared<RepCoordsState>();
  state->kernel = std::move(k);
  state->p = p;
  state->p_bar = p.conjugate();
  state->circle_points = std::max(cfg.circle_points, 16);
  state->step = 0.5 * state->kernel->polarized_clearance(p) * cfg.step_factor;
  const MetricValue mv = bergman_metric(*state->kernel, p, cfg);
  state->coeff = mv.g_inv.conjugate();
  state->diag_grad = u_side_gradient(*state->kernel, p, state->p_bar,
                                     state->step, state->circle_points);
  HolomorphicMap m;
  m.dim = state->kernel->dim();
  m.name = "representative-coordinates";
  m.eval = [state](const CVector& z) -> CVector {
    if ((z - state->p).norm() == 0.0)
      return CVector::Zero(state->p.size());  // maps p to 0 exactly
    const CVector grad = u_side_gradient(*state->kernel, z, state->p_bar,
                                         state->step, state->circle_points);
    return state->coeff * (grad - state->diag_grad);
  };
  auto eval_copy = m.eval;
  m.jacobian = [state, eval_copy](const CVector& z) {
    const double h = 0.25 * state->kernel->polarized_clearance(z);
    return deriv::holomorphic_jacobian(eval_copy, z, h, state->circle_points);
  };
  return m;
}

HolomorphicMap ball_representative_map(int n, const CVector& p) {
  if (p.norm() >= 1.0)
    throw ParameterError("ball_representative_map: p must be in the ball");
  const double rho = 1.0 - p.squaredNorm();
  HolomorphicMap m;
  m.dim = n;
  m.name = "ball-representative";
  m.source = domains::ball(n);
  m.eval = [p, rho](const CVector& z) -> CVector {
    const Complex d = 1.0 - hermitian_inner(z, p);
    return rho * (z - p) / d;
  };
  m.jacobian = [p, rho, n](const CVector& z) {
    const Complex d = 1.0 - hermitian_inner(z, p);
    CMatrix j(n, n);
    for (int i = 0; i < n; ++i)
      for (int k2 = 0; k2 < n; ++k2)
        j(i, k2) = rho * ((i == k2 ? d : Complex(0.0)) +
                          (z[i] - p[i]) * std::conj(p[k2])) /
                   (d * d);
    return j;
  };
  return m;
}

bool ellipsoid_membership(const HermitianForm& h, const CVector& zeta) {
  return h.quad(zeta) < h.dim() + 1.0;
}

HolomorphicMap with_numeric_jacobian(int n, std::string name,
                                     std::function<CVector(const CVector&)> f,
                                     double step) {
  HolomorphicMap m;
  m.dim = n;
  m.name = std::move(name);
  m.eval = std::move(f);
  m.jacobian = [g = m.eval, step](const CVector& z) {
    return deriv::holomorphic_jacobian(g, z, step);
  };
  return m;
}

}  // namespace bergman::maps
