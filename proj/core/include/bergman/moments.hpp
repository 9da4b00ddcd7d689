#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman/domain.hpp"
#include "bergman/integrate.hpp"
#include "bergman/kernels.hpp"
#include "bergman/multi_index.hpp"
#include "bergman/tolerance.hpp"

namespace bergman {

/// Measure d_eta = density * chi_domain * dm. The density plays the role of
/// |phi|^2; the default is 1.
struct MomentMeasure {
  DomainDescriptor domain;
  std::function<double(const CVector&)> density;  // nullptr means 1
  std::string name;

  /// Set when the moments have the powered-ball closed form: a centered ball
  /// of the given radius whose density realizes the lambda-power structure.
  struct PoweredBall {
    double lambda = 1.0;
    double radius = 1.0;
  };
  std::optional<PoweredBall> powered_ball;
  bool point_mass_at_origin = false;

  int dim() const { return point_mass_at_origin ? point_dim : domain.dim; }
  int point_dim = 0;

  double density_at(const CVector& z) const {
    return density ? density(z) : 1.0;
  }
};

MomentMeasure lebesgue_measure(DomainDescriptor dom);
/// Centered ball of the given radius with density 1 (lambda = 1 structure).
MomentMeasure ball_measure(int n, double radius = 1.0);
/// Unit ball with the radial density whose moments are delta_ab / c_{a,lambda}^2.
MomentMeasure powered_ball_measure(int n, double lambda);
/// Degenerate measure concentrated at the origin.
MomentMeasure point_mass_measure(int n);
/// Pushforward of a measure under a unitary map.
MomentMeasure unitary_pushforward(const MomentMeasure& m, const CMatrix& u);

struct MomentCell {
  MultiIndex alpha, beta;
  Complex estimate{0.0, 0.0};
  double stderr_est = 0.0;
  std::string engine;
};

struct MomentTable {
  int n = 0;
  int max_degree = 0;
  std::vector<MultiIndex> indices;  // graded-lex, |a| <= max_degree
  std::vector<MomentCell> cells;    // row-major over (alpha, beta)

  const MomentCell& at(std::size_t a_idx, std::size_t b_idx) const {
    return cells[a_idx * indices.size() + b_idx];
  }
  /// max |cell(a,b) - conj(cell(b,a))|.
  double hermitian_violation() const;
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

struct MomentConfig {
  Engine engine = Engine::MonteCarlo;
  std::size_t mc_samples = 1000000;
  int quadrature_degree = 0;  // 0 = derived from the requested degree
  std::uint64_t seed = kDefaultSeed;
};

/// Estimate of integral w^a conj(w)^b d_eta.
IntegralEstimate moment_integral(const MomentMeasure& m, const MultiIndex& a,
                                 const MultiIndex& b, const MomentConfig& cfg);

/// All moments with |a|,|b| <= max_degree; every cell carries its own
/// derived seed, so the table does not depend on scheduling order.
MomentTable build_moment_table(const MomentMeasure& m, int max_degree,
                               const MomentConfig& cfg);

struct MomentIdentityResult {
  MomentTable table;
  double lambda = 1.0;
  /// max over cells of |estimate - delta/c^2| / (stderr + delta/c^2).
  double max_residual = 0.0;
  /// max over cells of deviation / acceptance bound; pass iff <= 1.
  double worst_ratio = 0.0;
  MultiIndex worst_alpha, worst_beta;
  bool pass = false;
};

/// Checks estimate(a,b) against delta_ab / c_{a,lambda}^2.
MomentIdentityResult moment_identity_residual(const MomentMeasure& m,
                                              double lambda, int max_degree,
                                              const MomentConfig& cfg,
                                              const TolerancePolicy& pol = {});

/// integral Re(z_1)^{2m} d_eta for the lambda-powered unit-ball measure:
/// (pi^n/n!)^lambda 2^{-2m} (2m)! / (m! mu(mu+1)...(mu+m-1)).
double even_moment_closed_form(int m, double lambda, int n);
double log_even_moment_closed_form(int m, double lambda, int n);

/// (m/(mu+m))^m for m = 1..m_max; decreases monotonically to e^{-mu}.
std::vector<double> stirling_ratio_sequence(double mu, int m_max);

/// (integral Re(z_1)^{2 m_max} d_eta)^{1/(2 m_max)}: approaches the sup of
/// |Re z_1| over the support from below as m_max grows.
double support_reach_estimate(const MomentMeasure& m, int m_max,
                              const MomentConfig& cfg = {});

}  // namespace bergman
