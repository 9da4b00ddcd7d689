#include "bergman/diffgeo.hpp"

#include <cmath>
#include <sstream>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"
#include "bergman/rng.hpp"

namespace bergman {

namespace {

std::size_t i3(int n, int i, int k, int j) {
  return static_cast<std::size_t>((i * n + k) * n + j);
}
std::size_t i4(int n, int i, int k, int j, int l) {
  return static_cast<std::size_t>(((i * n + k) * n + j) * n + l);
}

// Derivative tensors of u = -log(1 - ||w||^2) in the ball variable.
struct PotentialDerivs {
  CMatrix u2;                // [a][b] = d_a d_bbar u
  std::vector<Complex> u3;   // [a][c][b] = d_a d_c d_bbar u
  std::vector<Complex> u4;   // [a][c][b][d]
};

PotentialDerivs ball_potential_derivs(const CVector& w, int order) {
  const int n = static_cast<int>(w.size());
  const double rho = 1.0 - w.squaredNorm();
  if (rho <= 0.0)
    throw DomainError("ball potential: point not inside the unit ball");
  const double r2 = rho * rho, r3 = r2 * rho, r4 = r3 * rho;
  PotentialDerivs p;
  p.u2.resize(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      p.u2(a, b) = (a == b ? 1.0 / rho : 0.0) + std::conj(w[a]) * w[b] / r2;
  if (order >= 3) {
    p.u3.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        for (int b = 0; b < n; ++b)
          p.u3[i3(n, a, c, b)] = (a == b ? std::conj(w[c]) / r2 : 0.0) +
                                 (b == c ? std::conj(w[a]) / r2 : 0.0) +
                                 2.0 * std::conj(w[a]) * w[b] * std::conj(w[c]) / r3;
  }
  if (order >= 4) {
    p.u4.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        for (int b = 0; b < n; ++b)
          for (int d = 0; d < n; ++d) {
            Complex v = 0.0;
            if (a == b)
              v += (c == d ? 1.0 / r2 : 0.0) + 2.0 * std::conj(w[c]) * w[d] / r3;
            if (b == c)
              v += (a == d ? 1.0 / r2 : 0.0) + 2.0 * std::conj(w[a]) * w[d] / r3;
            v += 2.0 *
                 ((a == d ? w[b] * std::conj(w[c]) : Complex(0.0)) +
                  (c == d ? std::conj(w[a]) * w[b] : Complex(0.0))) /
                 r3;
            v += 6.0 * std::conj(w[a]) * w[b] * std::conj(w[c]) * w[d] / r4;
            p.u4[i4(n, a, c, b, d)] = v;
          }
  }
  return p;
}

LogKernelDerivatives analytic_log_derivs(const PotentialStructure& ps,
                                         const CVector& z, int order) {
  const int n = static_cast<int>(z.size());
  const CMatrix& m = ps.map;
  const bool is_identity = m.isIdentity(1e-14);
  const CVector w = is_identity ? z : CVector(m * z);
  const PotentialDerivs p = ball_potential_derivs(w, order);
  LogKernelDerivatives out;
  out.n = n;
  out.order = order;
  if (is_identity) {
    out.d2 = ps.mu * p.u2;
    if (order >= 3) {
      out.d3 = p.u3;
      for (auto& v : out.d3) v *= ps.mu;
    }
    if (order >= 4) {
      out.d4 = p.u4;
      for (auto& v : out.d4) v *= ps.mu;
    }
    return out;
  }
  const CMatrix mc = m.conjugate();
  out.d2 = ps.mu * (m.transpose() * p.u2 * mc);
  if (order >= 3) {
    out.d3.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
          Complex v = 0.0;
          for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c)
              for (int b = 0; b < n; ++b)
                v += m(a, i) * m(c, k) * mc(b, j) * p.u3[i3(n, a, c, b)];
          out.d3[i3(n, i, k, j)] = ps.mu * v;
        }
  }
  if (order >= 4) {
    out.d4.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l) {
            Complex v = 0.0;
            for (int a = 0; a < n; ++a)
              for (int c = 0; c < n; ++c)
                for (int b = 0; b < n; ++b)
                  for (int d = 0; d < n; ++d)
                    v += m(a, i) * m(c, k) * mc(b, j) * mc(d, l) *
                         p.u4[i4(n, a, c, b, d)];
            out.d4[i4(n, i, k, j, l)] = ps.mu * v;
          }
  }
  return out;
}

struct NumericContext {
  deriv::PolarizedFn log_k;
  CVector z0, u0;
  double step;
  deriv::Options options;
};

NumericContext make_numeric_context(const Kernel& k, const CVector& z,
                                    const DerivConfig& cfg) {
  NumericContext ctx;
  double clearance = k.polarized_clearance(z);
  if (cfg.domain_clearance) {
    const double dc = cfg.domain_clearance(z);
    if (dc <= 0.0)
      throw GeometryError(
          "log_kernel_derivatives: point has no clearance inside the domain");
    clearance = std::min(clearance, 0.45 * dc);
  }
  if (!(clearance > 0.0))
    throw GeometryError("log_kernel_derivatives: zero stencil clearance");
  const bool central = cfg.path == DerivConfig::Path::Central;
  ctx.step = clearance * cfg.step_factor;
  if (central)
    ctx.step = cfg.central_step > 0.0 ? cfg.central_step
                                      : std::min(0.6 * clearance, 0.04);
  ctx.options.mode =
      central ? deriv::Mode::Central : deriv::Mode::Spectral;
  ctx.options.circle_points = cfg.circle_points;
  ctx.options.richardson_levels = cfg.central_levels;
  ctx.z0 = z;
  ctx.u0 = z.conjugate();
  const Complex k0 = k.eval_polarized(ctx.z0, ctx.u0);
  if (!(k0.real() > 0.0) || !std::isfinite(k0.real()))
    throw DomainError("log_kernel_derivatives: K(z,z) must be positive");
  const Complex log_k0 = std::log(k0);
  ctx.log_k = [&k, k0, log_k0](const CVector& zz, const CVector& uu) {
    const Complex v = k.eval_polarized(zz, uu);
    const Complex q = v / k0;
    if (!(q.real() > 0.0) || !std::isfinite(q.real()) ||
        !std::isfinite(q.imag()))
      throw GeometryError(
          "log_kernel_derivatives: stencil left the safe region; reduce the "
          "step (smaller step_factor)");
    return log_k0 + std::log(q);
  };
  return ctx;
}

deriv::Var hvar(int n, int i, int order) {
  deriv::Var v;
  v.hol = true;
  v.dir = CVector::Zero(n);
  v.dir[i] = 1.0;
  v.order = order;
  return v;
}
deriv::Var avar(int n, int j, int order) {
  deriv::Var v = hvar(n, j, order);
  v.hol = false;
  return v;
}

std::vector<deriv::Var> hol_pair_vars(int n, int i, int k) {
  if (i == k) return {hvar(n, i, 2)};
  return {hvar(n, i, 1), hvar(n, k, 1)};
}
std::vector<deriv::Var> anti_pair_vars(int n, int j, int l) {
  if (j == l) return {avar(n, j, 2)};
  return {avar(n, j, 1), avar(n, l, 1)};
}

LogKernelDerivatives numeric_log_derivs(const Kernel& k, const CVector& z,
                                        int order, const DerivConfig& cfg) {
  const int n = static_cast<int>(z.size());
  const NumericContext ctx = make_numeric_context(k, z, cfg);
  LogKernelDerivatives out;
  out.n = n;
  out.order = order;
  out.d2.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<deriv::Var> vars = {hvar(n, i, 1), avar(n, j, 1)};
      out.d2(i, j) = deriv::mixed_derivative(ctx.log_k, ctx.z0, ctx.u0, vars,
                                             ctx.step, ctx.options);
    }
  if (order >= 3) {
    out.d3.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k2 = 0; k2 < n; ++k2)
        for (int j = 0; j < n; ++j) {
          auto vars = hol_pair_vars(n, i, k2);
          vars.push_back(avar(n, j, 1));
          out.d3[i3(n, i, k2, j)] = deriv::mixed_derivative(
              ctx.log_k, ctx.z0, ctx.u0, vars, ctx.step, ctx.options);
        }
  }
  if (order >= 4) {
    out.d4.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k2 = 0; k2 < n; ++k2)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l) {
            auto vars = hol_pair_vars(n, i, k2);
            for (auto& v : anti_pair_vars(n, j, l)) vars.push_back(v);
            out.d4[i4(n, i, k2, j, l)] = deriv::mixed_derivative(
                ctx.log_k, ctx.z0, ctx.u0, vars, ctx.step, ctx.options);
          }
  }
  return out;
}

CMatrix metric_from_d2(const CMatrix& d2) { return (d2 + d2.adjoint()) / 2.0; }

CMatrix inverse_checked(const CMatrix& g, const CVector& z) {
  Eigen::LLT<CMatrix> llt(g);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g);
    std::ostringstream msg;
    msg << "bergman_metric: Hessian of log K indefinite at point; eigenvalues:";
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      msg << " " << es.eigenvalues()[i];
    (void)z;
    throw DefinitenessError(0, msg.str());
  }
  CMatrix inv = llt.solve(CMatrix::Identity(g.rows(), g.cols()));
  const double err = max_abs(g * inv - CMatrix::Identity(g.rows(), g.cols()));
  if (err > 1e-10)
    throw GeometryError("bergman_metric: inverse check failed, ||g g^-1 - I|| = " +
                        std::to_string(err));
  return inv;
}

}  // namespace

std::string DerivConfig::engine_tag(const Kernel& k) const {
  if (use_analytic(k)) return "analytic";
  if (path == Path::Central)
    return "central R" + std::to_string(central_levels);
  return "spectral M" + std::to_string(circle_points);
}

LogKernelDerivatives log_kernel_derivatives(const Kernel& k, const CVector& z,
                                            int order, const DerivConfig& cfg) {
  if (order < 2 || order > 4)
    throw ParameterError("log_kernel_derivatives: order must be 2, 3 or 4");
  if (cfg.use_analytic(k)) {
    const auto ps = k.potential_structure();
    if (!ps)
      throw ParameterError(
          "log_kernel_derivatives: analytic path requested for a kernel "
          "without closed-form structure");
    return analytic_log_derivs(*ps, z, order);
  }
  return numeric_log_derivs(k, z, order, cfg);
}

CMatrix ball_metric_closed_form(const CVector& z) {
  const int n = static_cast<int>(z.size());
  const double rho = 1.0 - z.squaredNorm();
  CMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = (n + 1.0) *
                ((i == j ? rho : 0.0) + std::conj(z[i]) * z[j]) / (rho * rho);
  return g;
}

MetricValue bergman_metric(const Kernel& k, const CVector& z,
                           const DerivConfig& cfg) {
  const LogKernelDerivatives d = log_kernel_derivatives(k, z, 2, cfg);
  MetricValue mv;
  mv.z = z;
  mv.g = metric_from_d2(d.d2);
  mv.g_inv = inverse_checked(mv.g, z);
  return mv;
}

double CurvatureTensor::kahler_symmetry_residual() const {
  double scale = 0.0;
  for (const auto& v : r) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          worst = std::max(worst, std::abs(at(i, j, k, l) - at(k, j, i, l)));
          worst = std::max(worst, std::abs(at(i, j, k, l) - at(i, l, k, j)));
        }
  return worst / scale;
}

CurvatureTensor curvature_tensor(const Kernel& k, const CVector& z,
                                 const DerivConfig& cfg) {
  const int n = k.dim();
  const LogKernelDerivatives d = log_kernel_derivatives(k, z, 4, cfg);
  const CMatrix g = metric_from_d2(d.d2);
  const CMatrix g_inv = inverse_checked(g, z);
  // the raised-index factor contracting (d_k g_{i qbar}) against
  // conj(d_l g_{j pbar}); the ball anchor H = -2/(n+1) pins this convention
  CurvatureTensor t;
  t.n = n;
  t.r.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k2 = 0; k2 < n; ++k2)
        for (int l = 0; l < n; ++l) {
          Complex corr = 0.0;
          for (int q = 0; q < n; ++q)
            for (int p = 0; p < n; ++p)
              corr += g_inv(q, p) * d.t3(i, k2, q) * std::conj(d.t3(j, l, p));
          t.r[static_cast<std::size_t>(((i * n + j) * n + k2) * n + l)] =
              -d.t4(i, k2, j, l) + corr;
        }
  return t;
}

CurvatureValue curvature_at(const Kernel& k, const CVector& z, const CVector& x,
                            const DerivConfig& cfg) {
  if (x.norm() == 0.0)
    throw ParameterError("curvature_at: direction must be nonzero");
  CurvatureValue cv;
  cv.z = z;
  cv.direction = x;
  cv.tensor = curvature_tensor(k, z, cfg);
  const int n = k.dim();
  const CMatrix g = bergman_metric(k, z, cfg).g;
  Complex rxxxx = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k2 = 0; k2 < n; ++k2)
        for (int l = 0; l < n; ++l)
          rxxxx += cv.tensor.at(i, j, k2, l) * x[i] * std::conj(x[j]) * x[k2] *
                   std::conj(x[l]);
  const double gxx = (x.transpose() * g * x.conjugate())(0).real();
  cv.sectional = rxxxx.real() / (gxx * gxx);
  return cv;
}

double sectional_curvature(const Kernel& k, const CVector& z, const CVector& x,
                           const DerivConfig& cfg) {
  if (x.norm() == 0.0)
    throw ParameterError("sectional_curvature: direction must be nonzero");
  const int n = k.dim();
  if (cfg.use_analytic(k)) {
    const LogKernelDerivatives d = log_kernel_derivatives(k, z, 4, cfg);
    const CMatrix g = metric_from_d2(d.d2);
    const CMatrix g_inv = inverse_checked(g, z);
    // V_q = sum_{ik} (d_k g_{i qbar}) X_i X_k
    CVector v = CVector::Zero(n);
    Complex q4 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k2 = 0; k2 < n; ++k2) {
        const Complex xik = x[i] * x[k2];
        for (int q = 0; q < n; ++q) v[q] += d.t3(i, k2, q) * xik;
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l)
            q4 += d.t4(i, k2, j, l) * xik * std::conj(x[j] * x[l]);
      }
    Complex corr = 0.0;
    for (int q = 0; q < n; ++q)
      for (int p = 0; p < n; ++p)
        corr += g_inv(q, p) * v[q] * std::conj(v[p]);
    const double gxx = (x.transpose() * g * x.conjugate())(0).real();
    return (-q4 + corr).real() / (gxx * gxx);
  }

  // numeric directional probe with the normalized direction
  const CVector xu = x / x.norm();
  const NumericContext ctx = make_numeric_context(k, z, cfg);
  const int n2 = n;
  CMatrix g(n2, n2);
  for (int i = 0; i < n2; ++i)
    for (int j = 0; j < n2; ++j) {
      std::vector<deriv::Var> vars = {hvar(n2, i, 1), avar(n2, j, 1)};
      g(i, j) = deriv::mixed_derivative(ctx.log_k, ctx.z0, ctx.u0, vars,
                                        ctx.step, ctx.options);
    }
  g = metric_from_d2(g);
  const CMatrix g_inv = inverse_checked(g, z);
  deriv::Var xh;  // direction X on the holomorphic side
  xh.hol = true;
  xh.dir = xu;
  xh.order = 2;
  deriv::Var xa;  // conj(X) on the anti side
  xa.hol = false;
  xa.dir = xu.conjugate();
  xa.order = 2;
  const Complex q4 = deriv::mixed_derivative(ctx.log_k, ctx.z0, ctx.u0,
                                             {xh, xa}, ctx.step, ctx.options);
  CVector v(n2);
  for (int q = 0; q < n2; ++q) {
    std::vector<deriv::Var> vars = {xh, avar(n2, q, 1)};
    v[q] = deriv::mixed_derivative(ctx.log_k, ctx.z0, ctx.u0, vars, ctx.step,
                                   ctx.options);
  }
  Complex corr = 0.0;
  for (int q = 0; q < n2; ++q)
    for (int p = 0; p < n2; ++p)
      corr += g_inv(q, p) * v[q] * std::conj(v[p]);
  const double gxx = (xu.transpose() * g * xu.conjugate())(0).real();
  return (-q4 + corr).real() / (gxx * gxx);
}

namespace {
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::string CurvatureReport::to_csv() const {
  std::ostringstream os;
  if (!samples.empty()) {
    const int n = static_cast<int>(samples.front().z.size());
    for (int i = 0; i < n; ++i) os << "re_z" << i + 1 << ",im_z" << i + 1 << ",";
    for (int i = 0; i < n; ++i) os << "re_x" << i + 1 << ",im_x" << i + 1 << ",";
    os << "H\n";
    for (const auto& s : samples) {
      for (int i = 0; i < n; ++i)
        os << fmt17(s.z[i].real()) << "," << fmt17(s.z[i].imag()) << ",";
      for (int i = 0; i < n; ++i)
        os << fmt17(s.x[i].real()) << "," << fmt17(s.x[i].imag()) << ",";
      os << fmt17(s.h) << "\n";
    }
  }
  os << "# footer min=" << fmt17(min_h) << " max=" << fmt17(max_h)
     << " mean=" << fmt17(mean_h) << " spread=" << fmt17(spread)
     << " constant=" << (constant ? 1 : 0) << " engine=" << engine
     << " seed=" << seed << "\n";
  return os.str();
}

nlohmann::json CurvatureReport::to_json() const {
  nlohmann::json j;
  j["schema"] = 1;
  j["engine"] = engine;
  j["seed"] = seed;
  j["stats"] = {{"min", min_h},
                {"max", max_h},
                {"mean", mean_h},
                {"spread", spread},
                {"tolerance", tolerance},
                {"constant", constant}};
  j["samples"] = nlohmann::json::array();
  for (const auto& s : samples) {
    nlohmann::json e;
    for (Eigen::Index i = 0; i < s.z.size(); ++i) {
      e["z"].push_back({s.z[i].real(), s.z[i].imag()});
      e["x"].push_back({s.x[i].real(), s.x[i].imag()});
    }
    e["H"] = s.h;
    j["samples"].push_back(std::move(e));
  }
  return j;
}

CurvatureReport curvature_scan(const Kernel& k, const DomainDescriptor& domain,
                               int samples, std::uint64_t seed,
                               const ScanOptions& options) {
  if (samples < 1) throw ParameterError("curvature_scan: samples must be >= 1");
  CurvatureReport report;
  report.seed = seed;
  report.tolerance = options.constancy_tolerance;
  report.engine = options.deriv.engine_tag(k);
  report.samples.resize(static_cast<std::size_t>(samples));
  DerivConfig cfg = options.deriv;
  if (!cfg.domain_clearance)
    cfg.domain_clearance = domain.clearance;
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t idx) {
    Rng rng(derive_seed(seed, idx));
    CVector z;
    int attempts = 0;
    for (;;) {
      z = domain.draw_box_point(rng);
      const bool ok = domain.contains(z) &&
                      domain.clearance(z) >= options.min_clearance &&
                      (!options.point_filter || options.point_filter(z));
      if (ok) break;
      if (++attempts > 100000)
        throw SamplingError("curvature_scan: cannot place points with the "
                            "required clearance in " + domain.name);
    }
    CVector x(k.dim());
    for (int i = 0; i < k.dim(); ++i) x[i] = rng.complex_normal();
    if (x.norm() == 0.0) x[0] = 1.0;
    CurvatureSample& out = report.samples[idx];
    out.z = z;
    out.x = x;
    out.h = sectional_curvature(k, z, x, cfg);
  });
  double lo = report.samples.front().h, hi = lo, sum = 0.0;
  for (const auto& s : report.samples) {
    lo = std::min(lo, s.h);
    hi = std::max(hi, s.h);
    sum += s.h;
  }
  report.min_h = lo;
  report.max_h = hi;
  report.mean_h = sum / samples;
  report.spread = hi - lo;
  report.constant = report.spread <= options.constancy_tolerance;
  return report;
}

double isometry_residual(const HolomorphicMap& t, const Kernel& k_src,
                         const Kernel& k_tgt, const CVector& z,
                         const DerivConfig& cfg) {
  const CVector tz = t.eval(z);
  if (t.target && !t.target->contains(tz))
    throw DomainError("isometry_residual: image point outside target domain");
  const CMatrix g_src = bergman_metric(k_src, z, cfg).g;
  DerivConfig tgt_cfg = cfg;
  tgt_cfg.domain_clearance = t.target ? t.target->clearance : nullptr;
  const CMatrix g_tgt = bergman_metric(k_tgt, tz, tgt_cfg).g;
  const CMatrix j = t.jacobian(z);
  const CMatrix pullback = j.transpose() * g_tgt * j.conjugate();
  return (g_src - pullback).norm() / g_src.norm();
}

}  // namespace bergman
