#include "bergman/moments.hpp"

#include <cmath>
#include <sstream>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"
#include "bergman/special.hpp"

namespace bergman {

MomentMeasure lebesgue_measure(DomainDescriptor dom) {
  MomentMeasure m;
  m.name = "lebesgue[" + dom.name + "]";
  m.domain = std::move(dom);
  return m;
}

MomentMeasure ball_measure(int n, double radius) {
  MomentMeasure m = lebesgue_measure(domains::ball(n, radius));
  m.powered_ball = MomentMeasure::PoweredBall{1.0, radius};
  return m;
}

MomentMeasure powered_ball_measure(int n, double lambda) {
  if (lambda <= 0.0)
    throw ParameterError("powered_ball_measure: lambda must be positive");
  const double mu = (n + 1) * lambda;
  if (mu <= n)
    throw ParameterError("powered_ball_measure: needs (n+1) lambda > n");
  MomentMeasure m = lebesgue_measure(domains::ball(n));
  m.name = "powered-ball n=" + std::to_string(n) +
           " lambda=" + std::to_string(lambda);
  if (lambda != 1.0) {
    // prefactor (pi^n)^{lambda-1} (n!)^{-lambda} prod_{j=1..n} (mu - j)
    double log_pref = (lambda - 1.0) * n * std::log(kPi) -
                      lambda * log_factorial(n);
    double prod = 1.0;
    for (int j = 1; j <= n; ++j) prod *= mu - j;
    const double pref = std::exp(log_pref) * prod;
    const double expo = mu - n - 1.0;
    m.density = [pref, expo](const CVector& z) {
      return pref * std::pow(1.0 - z.squaredNorm(), expo);
    };
  }
  m.powered_ball = MomentMeasure::PoweredBall{lambda, 1.0};
  return m;
}

MomentMeasure point_mass_measure(int n) {
  MomentMeasure m;
  m.name = "point-mass-n" + std::to_string(n);
  m.point_mass_at_origin = true;
  m.point_dim = n;
  return m;
}

MomentMeasure unitary_pushforward(const MomentMeasure& m, const CMatrix& u) {
  if (m.point_mass_at_origin) return m;
  MomentMeasure out;
  out.domain = domains::unitary_image(m.domain, u);
  out.name = m.name + "-rotated";
  const CMatrix u_inv = u.adjoint();
  if (m.density) {
    out.density = [d = m.density, u_inv](const CVector& z) {
      return d(u_inv * z);
    };
  }
  out.powered_ball = m.powered_ball;  // radial structure survives rotation
  return out;
}

double MomentTable::hermitian_violation() const {
  double worst = 0.0;
  const std::size_t k = indices.size();
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      worst = std::max(worst, std::abs(at(a, b).estimate -
                                       std::conj(at(b, a).estimate)));
  return worst;
}

namespace {
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
std::string idx_str(const MultiIndex& a) {
  std::string s;
  for (int i = 0; i < a.dim(); ++i) {
    if (i) s += ";";
    s += std::to_string(a[i]);
  }
  return s;
}
}  // namespace

std::string MomentTable::to_csv() const {
  std::ostringstream os;
  os << "alpha,beta,re,im,stderr,engine\n";
  for (const auto& c : cells)
    os << idx_str(c.alpha) << "," << idx_str(c.beta) << ","
       << fmt17(c.estimate.real()) << "," << fmt17(c.estimate.imag()) << ","
       << fmt17(c.stderr_est) << "," << c.engine << "\n";
  return os.str();
}

nlohmann::json MomentTable::to_json() const {
  nlohmann::json j;
  j["schema"] = 1;
  j["n"] = n;
  j["max_degree"] = max_degree;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : cells)
    j["cells"].push_back({{"alpha", c.alpha.entries()},
                          {"beta", c.beta.entries()},
                          {"re", c.estimate.real()},
                          {"im", c.estimate.imag()},
                          {"stderr", c.stderr_est},
                          {"engine", c.engine}});
  return j;
}

IntegralEstimate moment_integral(const MomentMeasure& m, const MultiIndex& a,
                                 const MultiIndex& b, const MomentConfig& cfg) {
  if (m.point_mass_at_origin) {
    IntegralEstimate est;
    est.value = (a.order() == 0 && b.order() == 0) ? 1.0 : 0.0;
    est.engine = "point-mass";
    return est;
  }
  auto f = [&](const CVector& z) {
    return a.monomial(z) * b.conj_monomial(z) * m.density_at(z);
  };
  if (cfg.engine == Engine::Quadrature) {
    const int deg =
        cfg.quadrature_degree > 0
            ? cfg.quadrature_degree
            : std::max(a.order(), b.order());
    return integrate_quadrature(m.domain, f, deg);
  }
  return integrate_monte_carlo(m.domain, f, cfg.mc_samples, cfg.seed);
}

MomentTable build_moment_table(const MomentMeasure& m, int max_degree,
                               const MomentConfig& cfg) {
  MomentTable table;
  table.n = m.dim();
  table.max_degree = max_degree;
  table.indices = enumerate_multiindices(table.n, max_degree);
  const std::size_t k = table.indices.size();
  table.cells.resize(k * k);
  parallel_for(k * k, [&](std::size_t cell) {
    const std::size_t ai = cell / k, bi = cell % k;
    MomentConfig cell_cfg = cfg;
    cell_cfg.seed = derive_seed(cfg.seed, cell);
    if (cfg.engine == Engine::Quadrature && cfg.quadrature_degree == 0)
      cell_cfg.quadrature_degree = max_degree;
    const IntegralEstimate est =
        moment_integral(m, table.indices[ai], table.indices[bi], cell_cfg);
    MomentCell& out = table.cells[cell];
    out.alpha = table.indices[ai];
    out.beta = table.indices[bi];
    out.estimate = est.value;
    out.stderr_est = est.stderr_est;
    out.engine = est.engine;
  });
  return table;
}

MomentIdentityResult moment_identity_residual(const MomentMeasure& m,
                                              double lambda, int max_degree,
                                              const MomentConfig& cfg,
                                              const TolerancePolicy& pol) {
  pol.validate();
  MomentIdentityResult res;
  res.lambda = lambda;
  res.table = build_moment_table(m, max_degree, cfg);
  const std::size_t k = res.table.indices.size();
  const int n = res.table.n;
  double max_expected = 0.0;
  std::vector<double> expected(k);
  for (std::size_t a = 0; a < k; ++a) {
    const double c = c_alpha(res.table.indices[a], lambda, n);
    expected[a] = 1.0 / (c * c);
    max_expected = std::max(max_expected, expected[a]);
  }
  res.pass = true;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      const MomentCell& cell = res.table.at(a, b);
      const double exp_ab = (a == b) ? expected[a] : 0.0;
      const double dev = std::abs(cell.estimate - exp_ab);
      const double residual = dev / (cell.stderr_est + exp_ab);
      const double bound =
          std::max(pol.monte_carlo_bound(exp_ab, cell.stderr_est),
                   pol.closed_form * max_expected);
      const double ratio = dev / bound;
      if (residual > res.max_residual) res.max_residual = residual;
      if (ratio > res.worst_ratio) {
        res.worst_ratio = ratio;
        res.worst_alpha = cell.alpha;
        res.worst_beta = cell.beta;
      }
      if (ratio > 1.0) res.pass = false;
    }
  return res;
}

double log_even_moment_closed_form(int m, double lambda, int n) {
  if (m < 1) throw ParameterError("even_moment_closed_form: m must be >= 1");
  if (lambda <= 0.0)
    throw ParameterError("even_moment_closed_form: lambda must be positive");
  const double mu = (n + 1) * lambda;
  return lambda * (n * std::log(kPi) - log_factorial(n)) -
         2.0 * m * std::log(2.0) + log_factorial(2 * m) - log_factorial(m) -
         log_pochhammer(mu, m);
}

double even_moment_closed_form(int m, double lambda, int n) {
  return std::exp(log_even_moment_closed_form(m, lambda, n));
}

std::vector<double> stirling_ratio_sequence(double mu, int m_max) {
  if (mu <= 0.0)
    throw ParameterError("stirling_ratio_sequence: mu must be positive");
  if (m_max < 1)
    throw ParameterError("stirling_ratio_sequence: m_max must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(m_max));
  for (int m = 1; m <= m_max; ++m)
    out[static_cast<std::size_t>(m - 1)] =
        std::exp(-m * std::log1p(mu / m));
  return out;
}

double support_reach_estimate(const MomentMeasure& m, int m_max,
                              const MomentConfig& cfg) {
  if (m_max < 1)
    throw ParameterError("support_reach_estimate: m_max must be >= 1");
  if (m.point_mass_at_origin) return 0.0;
  if (m.powered_ball) {
    const auto& pb = *m.powered_ball;
    const int n = m.domain.dim;
    double log_moment = log_even_moment_closed_form(m_max, pb.lambda, n);
    if (pb.radius != 1.0)
      log_moment += (2.0 * m_max + 2.0 * n) * std::log(pb.radius);
    return std::exp(log_moment / (2.0 * m_max));
  }
  if (m_max > 50)
    throw ParameterError(
        "support_reach_estimate: quadrature path supports m_max <= 50; "
        "use a measure with closed-form moments for larger m");
  MomentConfig qcfg = cfg;
  qcfg.engine = Engine::Quadrature;
  qcfg.quadrature_degree = 2 * m_max;
  auto f = [&](const CVector& z) {
    return Complex(std::pow(z[0].real(), 2.0 * m_max) * m.density_at(z), 0.0);
  };
  const IntegralEstimate est =
      integrate_quadrature(m.domain, f, qcfg.quadrature_degree);
  if (est.value.real() <= 0.0)
    throw SamplingError(
        "support_reach_estimate: nonpositive estimated moment (noise "
        "dominates); increase resolution");
  return std::pow(est.value.real(), 1.0 / (2.0 * m_max));
}

}  // namespace bergman
