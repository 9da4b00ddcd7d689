#pragma once

#include <functional>
#include <vector>

#include "bergman/types.hpp"

namespace bergman::deriv {

/// A function of doubled variables F(z,u), holomorphic in both jointly.
using PolarizedFn = std::function<Complex(const CVector&, const CVector&)>;

enum class Mode {
  /// Circle (trapezoidal Fourier) quadrature of the Cauchy integral; the
  /// truncation error decays geometrically in the node count so large steps
  /// and near machine precision are possible.
  Spectral,
  /// Central differences along the real axis of each complex variable with
  /// Richardson extrapolation; derivatives are assembled from plain kernel
  /// evaluations only.
  Central,
};

struct Options {
  Mode mode = Mode::Spectral;
  /// Circle nodes per variable (Spectral).
  int circle_points = 16;
  /// Extrapolation levels h, h/2, ... (Central).
  int richardson_levels = 3;
};

/// One differentiation variable: a direction in the z slot (hol = true) or
/// the u slot, with derivative order 1 or 2 along it.
struct Var {
  bool hol = true;
  CVector dir;
  int order = 1;
};

/// Mixed directional derivative of F at (z0, u0):
///   d^{k_1}/da_1^{k_1} ... F(z0 + sum_hol a_v dir_v, u0 + sum_anti a_v dir_v)
/// evaluated at a = 0. `step` is the base radius/step before per-variable
/// direction normalization.
Complex mixed_derivative(const PolarizedFn& f, const CVector& z0,
                         const CVector& u0, const std::vector<Var>& vars,
                         double step, const Options& opt = {});

/// Jacobian of a holomorphic map g at z via per-variable circle quadrature.
CMatrix holomorphic_jacobian(const std::function<CVector(const CVector&)>& g,
                             const CVector& z, double step,
                             int circle_points = 16);

}  // namespace bergman::deriv
