#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman/deriv.hpp"
#include "bergman/domain.hpp"
#include "bergman/holomap.hpp"
#include "bergman/kernels.hpp"

namespace bergman {

/// How log-kernel derivatives are produced.
struct DerivConfig {
  enum class Path { Auto, Analytic, Spectral, Central };
  Path path = Path::Auto;
  int circle_points = 16;
  /// Scales the kernel-reported polarization clearance.
  double step_factor = 1.0;
  /// Base step for the central-difference path; 0 picks one from clearance.
  double central_step = 0.0;
  int central_levels = 3;
  /// Extra clearance bound from the domain the point lives in.
  std::function<double(const CVector&)> domain_clearance;

  bool analytic_available(const Kernel& k) const {
    return k.potential_structure().has_value();
  }
  bool use_analytic(const Kernel& k) const {
    return path == Path::Analytic ||
           (path == Path::Auto && analytic_available(k));
  }
  std::string engine_tag(const Kernel& k) const;
};

/// Mixed Wirtinger derivatives of log K(z,z) at a point, up to order (2,2).
struct LogKernelDerivatives {
  int n = 0;
  int order = 2;
  CMatrix d2;                // [i][j] = d_i d_jbar log K
  std::vector<Complex> d3;   // [i][k][j] = d_i d_k d_jbar log K
  std::vector<Complex> d4;   // [i][k][j][l] = d_i d_k d_jbar d_lbar log K

  Complex t3(int i, int k, int j) const {
    return d3[static_cast<std::size_t>((i * n + k) * n + j)];
  }
  Complex t4(int i, int k, int j, int l) const {
    return d4[static_cast<std::size_t>(((i * n + k) * n + j) * n + l)];
  }
};

/// order: 2 = metric only, 3 adds d3, 4 adds d4.
LogKernelDerivatives log_kernel_derivatives(const Kernel& k, const CVector& z,
                                            int order,
                                            const DerivConfig& cfg = {});

struct MetricValue {
  CVector z;
  CMatrix g;      // positive definite Hermitian
  CMatrix g_inv;  // ||g g_inv - I||_inf <= 1e-10
};

MetricValue bergman_metric(const Kernel& k, const CVector& z,
                           const DerivConfig& cfg = {});

/// Closed-form ball metric (n+1)[(1-|z|^2) delta_ij + conj(z_i) z_j]/(1-|z|^2)^2.
CMatrix ball_metric_closed_form(const CVector& z);

struct CurvatureTensor {
  int n = 0;
  std::vector<Complex> r;  // [i][j][k][l] = R_{i jbar k lbar}

  Complex at(int i, int j, int k, int l) const {
    return r[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
  /// Worst violation of R_{ij.kl.} = R_{kj.il.} = R_{il.kj.}, normalized.
  double kahler_symmetry_residual() const;
};

/// R_{i jbar k lbar} = -d_k d_lbar g_{i jbar}
///                     + sum_{p,q} g^{q pbar} (d_k g_{i qbar})(d_lbar g_{p jbar}).
CurvatureTensor curvature_tensor(const Kernel& k, const CVector& z,
                                 const DerivConfig& cfg = {});

struct CurvatureValue {
  CVector z;
  CurvatureTensor tensor;
  CVector direction;
  double sectional = 0.0;
};

CurvatureValue curvature_at(const Kernel& k, const CVector& z, const CVector& x,
                            const DerivConfig& cfg = {});

/// H(z,X) = R(X, Xbar, X, Xbar) / g(X, Xbar)^2; invariant under complex
/// scaling of X. Uses a directional probe rather than the full tensor.
double sectional_curvature(const Kernel& k, const CVector& z, const CVector& x,
                           const DerivConfig& cfg = {});

struct CurvatureSample {
  CVector z;
  CVector x;
  double h = 0.0;
};

struct CurvatureReport {
  std::vector<CurvatureSample> samples;
  double min_h = 0.0, max_h = 0.0, mean_h = 0.0, spread = 0.0;
  double tolerance = 0.0;
  bool constant = false;
  std::string engine;
  std::uint64_t seed = 0;

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

struct ScanOptions {
  double min_clearance = 0.02;
  double constancy_tolerance = 1e-6;
  std::function<bool(const CVector&)> point_filter;  // optional extra mask
  DerivConfig deriv;
};

/// Sectional curvature at seeded random (z, X); deterministic per index, so
/// parallel evaluation cannot change the report.
CurvatureReport curvature_scan(const Kernel& k, const DomainDescriptor& domain,
                               int samples, std::uint64_t seed,
                               const ScanOptions& options = {});

/// Frobenius norm of g_src(z) - J^T g_tgt(T z) conj(J), over ||g_src(z)||.
double isometry_residual(const HolomorphicMap& t, const Kernel& k_src,
                         const Kernel& k_tgt, const CVector& z,
                         const DerivConfig& cfg = {});

}  // namespace bergman
