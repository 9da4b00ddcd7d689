#include "bergman/deriv.hpp"

#include <cmath>

#include "bergman/errors.hpp"

namespace bergman::deriv {

namespace {

struct Stencil1D {
  std::vector<Complex> offsets;
  std::vector<Complex> weights;
};

Stencil1D spectral_stencil(int order, double h, int m) {
  Stencil1D s;
  s.offsets.reserve(static_cast<std::size_t>(m));
  s.weights.reserve(static_cast<std::size_t>(m));
  double k_fact = 1.0;
  for (int k = 2; k <= order; ++k) k_fact *= k;
  const double hk = std::pow(h, order);
  for (int j = 0; j < m; ++j) {
    const double th = 2.0 * kPi * j / m;
    const Complex w = Complex(std::cos(th), std::sin(th));
    s.offsets.push_back(h * w);
    // k! / (m h^k) * omega^{-jk}
    const double phase = -2.0 * kPi * j * order / m;
    s.weights.push_back(k_fact / (m * hk) *
                        Complex(std::cos(phase), std::sin(phase)));
  }
  return s;
}

Stencil1D central_stencil(int order, double h) {
  Stencil1D s;
  if (order == 1) {
    s.offsets = {Complex(-h, 0), Complex(h, 0)};
    s.weights = {Complex(-0.5 / h, 0), Complex(0.5 / h, 0)};
  } else if (order == 2) {
    s.offsets = {Complex(-h, 0), Complex(0, 0), Complex(h, 0)};
    const double h2 = h * h;
    s.weights = {Complex(1.0 / h2, 0), Complex(-2.0 / h2, 0),
                 Complex(1.0 / h2, 0)};
  } else {
    throw ParameterError("central_stencil: order must be 1 or 2");
  }
  return s;
}

Complex tensor_apply(const PolarizedFn& f, const CVector& z0, const CVector& u0,
                     const std::vector<Var>& vars,
                     const std::vector<Stencil1D>& stencils) {
  const std::size_t v = vars.size();
  std::vector<std::size_t> idx(v, 0);
  Complex acc = 0.0;
  while (true) {
    CVector z = z0, u = u0;
    Complex w = 1.0;
    for (std::size_t a = 0; a < v; ++a) {
      const Complex off = stencils[a].offsets[idx[a]];
      w *= stencils[a].weights[idx[a]];
      if (vars[a].hol)
        z += off * vars[a].dir;
      else
        u += off * vars[a].dir;
    }
    acc += w * f(z, u);
    std::size_t a = 0;
    for (; a < v; ++a) {
      if (++idx[a] < stencils[a].offsets.size()) break;
      idx[a] = 0;
    }
    if (a == v) break;
  }
  return acc;
}

}  // namespace

Complex mixed_derivative(const PolarizedFn& f, const CVector& z0,
                         const CVector& u0, const std::vector<Var>& vars,
                         double step, const Options& opt) {
  if (vars.empty()) return f(z0, u0);
  if (step <= 0.0) throw ParameterError("mixed_derivative: step must be > 0");

  // normalize directions; a direction of norm c scales the derivative by c^k
  std::vector<Var> unit = vars;
  double dir_scale = 1.0;
  for (auto& var : unit) {
    const double nrm = var.dir.norm();
    if (nrm == 0.0) throw ParameterError("mixed_derivative: zero direction");
    for (int k = 0; k < var.order; ++k) dir_scale *= nrm;
    var.dir /= nrm;
    if (var.order < 1 || var.order > 2)
      throw ParameterError("mixed_derivative: order must be 1 or 2");
  }

  if (opt.mode == Mode::Spectral) {
    std::vector<Stencil1D> st;
    st.reserve(unit.size());
    for (const auto& var : unit)
      st.push_back(spectral_stencil(var.order, step, opt.circle_points));
    return dir_scale * tensor_apply(f, z0, u0, unit, st);
  }

  // Central mode: evaluate the product stencil at step, step/2, ... and
  // Richardson-extrapolate the h^2 error expansion.
  const int levels = std::max(1, opt.richardson_levels);
  std::vector<Complex> t(static_cast<std::size_t>(levels));
  double h = step;
  for (int l = 0; l < levels; ++l, h *= 0.5) {
    std::vector<Stencil1D> st;
    st.reserve(unit.size());
    for (const auto& var : unit) st.push_back(central_stencil(var.order, h));
    t[static_cast<std::size_t>(l)] = tensor_apply(f, z0, u0, unit, st);
  }
  for (int k = 1; k < levels; ++k) {
    const double factor = std::pow(4.0, k);
    for (int l = 0; l + k < levels; ++l) {
      const auto i = static_cast<std::size_t>(l);
      t[i] = (factor * t[i + 1] - t[i]) / (factor - 1.0);
    }
  }
  return dir_scale * t[0];
}

CMatrix holomorphic_jacobian(const std::function<CVector(const CVector&)>& g,
                             const CVector& z, double step, int circle_points) {
  const int n = static_cast<int>(z.size());
  const Stencil1D st = spectral_stencil(1, step, circle_points);
  CMatrix j(n, n);
  j.setZero();
  for (int col = 0; col < n; ++col) {
    CVector acc = CVector::Zero(n);
    for (std::size_t s = 0; s < st.offsets.size(); ++s) {
      CVector zp = z;
      zp[col] += st.offsets[s];
      acc += st.weights[s] * g(zp);
    }
    j.col(col) = acc;
  }
  return j;
}

}  // namespace bergman::deriv
