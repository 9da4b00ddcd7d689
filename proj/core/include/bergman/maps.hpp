#pragma once

#include "bergman/diffgeo.hpp"
#include "bergman/hermitian.hpp"
#include "bergman/holomap.hpp"
#include "bergman/kernels.hpp"

namespace bergman::maps {

HolomorphicMap identity(int n);

/// Linear map by a unitary matrix; rejects non-unitary input at 1e-12.
HolomorphicMap unitary(const CMatrix& u);

/// Haar-distributed unitary via QR of a Gaussian matrix (deterministic seed).
CMatrix haar_unitary(int n, std::uint64_t seed);

/// Automorphism of B^2 fixing the slice {z_2 = 0}:
///   z -> ( (a - z_1)/(1 - conj(a) z_1),
///          sqrt(1-|a|^2) z_2 / (1 - conj(a) z_1) ),  |a| < 1.
HolomorphicMap disc_mobius_lift(Complex a);

/// (z', z_n) -> (z' z_n, z_n): collapses the slice {z_n = 0} of the slit
/// ball onto a single boundary point of the image domain.
HolomorphicMap blowdown(int n);
/// Inverse (w', w_n) -> (w'/w_n, w_n); rejects w_n = 0.
HolomorphicMap blowdown_inverse(int n);

/// Lift of a ball automorphism A of B^{n-1} to B^n by the n-th root of its
/// Jacobian determinant T:  z -> (A(z'), T(z')^{1/n} z_n). The principal
/// branch is anchored at z' = 0 through the closed form of T.
struct JacobianRootLift {
  HolomorphicMap map;
  /// A(z') on B^{n-1}.
  std::function<CVector(const CVector&)> base_map;
  /// T(z') = det J_A(z'), nonvanishing on B^{n-1}.
  std::function<Complex(const CVector&)> base_jacobian_det;
  int n = 0;
};
/// Supported base automorphisms: the disk Mobius map (n = 2) and its B^2
/// lift (n = 3), both parameterized by a with |a| < 1.
JacobianRootLift jacobian_root_lift(int n, Complex a);
/// Degenerate member with A = identity, T = 1; the lift is the identity.
JacobianRootLift jacobian_root_lift_identity(int n);

/// L(zeta) = (n+1)^{-1/2} zeta A with H = A A^*; maps E_H onto B^n.
HolomorphicMap ellipsoid_normalizer(const HermitianForm& h);

/// Kernel-defined representative coordinates at p:
///   w_i(z) = sum_j g^{i jbar}(p) [ d_{zeta_j bar} log K(z,zeta)|_{zeta=p}
///                                 - d_{zeta_j bar} log K(zeta,zeta)|_{zeta=p} ].
/// The map vanishes at p exactly and has Jacobian = identity at p.
HolomorphicMap representative_map(KernelPtr k, const CVector& p,
                                  const DerivConfig& cfg = {});
CVector representative_coordinates(const Kernel& k, const CVector& p,
                                   const CVector& z,
                                   const DerivConfig& cfg = {});

/// Closed form of the representative map of the unit ball at p:
///   z -> (1-||p||^2)(z-p)/(1-<z,p>); an oracle for the kernel-defined map.
HolomorphicMap ball_representative_map(int n, const CVector& p);

/// zeta H zeta^* < n+1.
bool ellipsoid_membership(const HermitianForm& h, const CVector& zeta);

/// Wrap an evaluator with a circle-quadrature numeric Jacobian.
HolomorphicMap with_numeric_jacobian(int n, std::string name,
                                     std::function<CVector(const CVector&)> f,
                                     double step = 0.05);

}  // namespace bergman::maps
