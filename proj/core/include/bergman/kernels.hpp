#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman/domain.hpp"
#include "bergman/hermitian.hpp"
#include "bergman/holomap.hpp"
#include "bergman/integrate.hpp"
#include "bergman/multi_index.hpp"

namespace bergman {

/// Scalar holomorphic function; dictionary entries and the weight factor of
/// powered kernels.
class HoloFunction {
 public:
  virtual ~HoloFunction() = default;
  virtual Complex eval(const CVector& z) const = 0;
  virtual std::string describe() const = 0;
  /// conj(f(w)) as a holomorphic function of u = conj(w).
  Complex eval_conj_polarized(const CVector& u) const {
    return std::conj(eval(u.conjugate()));
  }
};
using HoloFunctionPtr = std::shared_ptr<const HoloFunction>;

HoloFunctionPtr phi_one();
HoloFunctionPtr phi_constant(Complex c);
HoloFunctionPtr phi_coordinate(int j);
HoloFunctionPtr phi_monomial(MultiIndex a);
/// z^k on C \ {0}; k may be negative (annulus dictionaries).
HoloFunctionPtr phi_laurent(int k);

struct BasisDictionary {
  std::vector<HoloFunctionPtr> functions;
  std::string tag;
  int size() const { return static_cast<int>(functions.size()); }

  static BasisDictionary monomials(int n, int max_degree);
  static BasisDictionary laurent(int k_min, int k_max);
};

/// Orthonormalization coefficient of the powered-ball basis
///   c_{0,lambda}   = ((n!/pi^n)^lambda)^{1/2}
///   c_{a,lambda}   = ((n!/pi^n)^lambda mu(mu+1)...(mu+|a|-1) / a!)^{1/2},
/// with mu = (n+1) lambda. Computed in log space.
double c_alpha(const MultiIndex& alpha, double lambda, int n);

/// Declared truncation-tail bound of the degree-N series at radius rho:
/// (n!/pi^n)^lambda * sum_{k>N} (k+1)^{n+ceil(mu)} rho^{2k}.
double series_tail_bound(int n, double lambda, double rho, int degree);
/// Smallest degree whose tail bound is below tol/2.
int choose_truncation_degree(int n, double lambda, double rho, double tol);

/// Serializable coefficient table of a truncated orthonormal expansion.
struct CoefficientTable {
  int n = 0;
  double lambda = 1.0;
  int degree = 0;
  std::vector<std::pair<MultiIndex, double>> coeffs;  // alpha -> c_alpha

  static CoefficientTable powered_ball(int n, double lambda, int degree);
  nlohmann::json to_json() const;
  static CoefficientTable from_json(const nlohmann::json& j);
};

/// Structure of kernels whose log on the diagonal is, up to a pluriharmonic
/// term, mu * (-log(1 - ||M z||^2)); enables analytic metric/curvature.
struct PotentialStructure {
  double mu = 0.0;
  CMatrix map;
};

/// Evaluatable kernel, holomorphic in the first slot and anti-holomorphic in
/// the second. All variants expose the polarized form K~(z,u) = K(z, conj u),
/// jointly holomorphic, which the derivative engines differentiate.
class Kernel {
 public:
  explicit Kernel(int n) : n_(n) {}
  virtual ~Kernel() = default;

  int dim() const { return n_; }
  virtual Complex eval_polarized(const CVector& z, const CVector& u) const = 0;
  Complex eval(const CVector& z, const CVector& w) const {
    return eval_polarized(z, w.conjugate());
  }
  /// K(z,z); real up to roundoff.
  double diagonal(const CVector& z) const { return eval(z, z).real(); }

  virtual std::optional<PotentialStructure> potential_structure() const {
    return std::nullopt;
  }
  /// Safe polarization radius around (z, conj z) for log-derivative probes.
  virtual double polarized_clearance(const CVector& z) const;
  virtual std::string describe() const = 0;

 private:
  int n_;
};
using KernelPtr = std::shared_ptr<const Kernel>;

KernelPtr ball_kernel_model(int n);
KernelPtr powered_kernel_model(int n, double lambda,
                               HoloFunctionPtr phi = nullptr);
KernelPtr ellipsoid_kernel_model(const HermitianForm& h);
KernelPtr annulus_kernel_model(double inner_radius);
KernelPtr series_kernel_model(CoefficientTable table,
                              HoloFunctionPtr phi = nullptr);
/// K_src(z,w) = det J_f(z) K_base(f(z), f(w)) conj(det J_f(w)).
KernelPtr pullback_kernel_model(KernelPtr base, HolomorphicMap f,
                                std::optional<DomainDescriptor> source =
                                    std::nullopt);

/// Kernel of the closure of the dictionary span, estimated from the Gram
/// matrix of the dictionary over the domain. No regularization is applied;
/// ill-conditioning raises ConditioningError with the eigenvalue ratio.
KernelPtr gram_kernel_estimate(const DomainDescriptor& domain,
                               const BasisDictionary& dict,
                               const IntegrationConfig& cfg);

// ---- closed-form evaluators with the documented domain checks ----

/// (n!/pi^n) (1 - <z,w>)^{-(n+1)} for z,w in the unit ball.
Complex ball_kernel(int n, const CVector& z, const CVector& w);

/// phi(z) conj(phi(w)) K_ball^lambda(z,w); principal branch of the power.
Complex powered_kernel(double lambda, const HoloFunctionPtr& phi, int n,
                       const CVector& z, const CVector& w);

/// d^{|beta|}/dz^beta at z=0 of K_ball^lambda(z,w):
/// (n!/pi^n)^lambda mu...(mu+|beta|-1) conj(w)^beta.
Complex deriv_power_kernel(const MultiIndex& beta, double lambda, int n,
                           const CVector& w);

/// Truncated orthonormal expansion evaluated from an explicit table.
Complex series_kernel(const CoefficientTable& table, const HoloFunctionPtr& phi,
                      const CVector& z, const CVector& w);

/// Annulus r < |z| < 1 kernel from Laurent monomial norms.
Complex annulus_kernel(double inner_radius, Complex z, Complex w);

/// K_{E_H}(zeta,zeta) = C (1 - zeta H zeta^*/(n+1))^{-(n+1)},
/// C = (n!/pi^n) det H / (n+1)^n.
double ellipsoid_kernel_diag(const HermitianForm& h, const CVector& zeta);
double ellipsoid_kernel_constant(const HermitianForm& h);

/// |K_src(z,w) - det J_f(z) K_tgt(f z, f w) conj(det J_f(w))| / (1 + |K_src|).
double transformation_law_residual(const HolomorphicMap& f, const Kernel& k_src,
                                   const Kernel& k_tgt, const CVector& z,
                                   const CVector& w);

/// | integral K(z,.) f dm - f(z) | for a dictionary element f; exercises the
/// reproducing property with the same integration engine that built the Gram.
double reproducing_residual(const Kernel& k, const DomainDescriptor& domain,
                            const IntegrationConfig& cfg,
                            const HoloFunction& f, const CVector& z);

}  // namespace bergman
