#include "bergman/kernels.hpp"

#include <cmath>

#include "bergman/errors.hpp"
#include "bergman/special.hpp"

namespace bergman {

namespace {

double log_ball_constant(int n) {  // log(n!/pi^n)
  return log_factorial(n) - n * std::log(kPi);
}

Complex int_power(Complex base, int k) {
  if (k < 0) return 1.0 / int_power(base, -k);
  Complex r = 1.0;
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

Complex bilinear_dot(const CVector& a, const CVector& b) {
  Complex s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ---- scalar holomorphic functions ----

class PhiConstant final : public HoloFunction {
 public:
  explicit PhiConstant(Complex c) : c_(c) {}
  Complex eval(const CVector&) const override { return c_; }
  std::string describe() const override {
    return c_ == Complex(1.0, 0.0) ? "1" : "const";
  }

 private:
  Complex c_;
};

class PhiCoordinate final : public HoloFunction {
 public:
  explicit PhiCoordinate(int j) : j_(j) {}
  Complex eval(const CVector& z) const override { return z[j_]; }
  std::string describe() const override { return "z_" + std::to_string(j_ + 1); }

 private:
  int j_;
};

class PhiMonomial final : public HoloFunction {
 public:
  explicit PhiMonomial(MultiIndex a) : a_(std::move(a)) {}
  Complex eval(const CVector& z) const override { return a_.monomial(z); }
  std::string describe() const override { return "z^" + a_.to_string(); }

 private:
  MultiIndex a_;
};

class PhiLaurent final : public HoloFunction {
 public:
  explicit PhiLaurent(int k) : k_(k) {}
  Complex eval(const CVector& z) const override { return int_power(z[0], k_); }
  std::string describe() const override { return "z^" + std::to_string(k_); }

 private:
  int k_;
};

}  // namespace

HoloFunctionPtr phi_one() { return std::make_shared<PhiConstant>(1.0); }
HoloFunctionPtr phi_constant(Complex c) {
  return std::make_shared<PhiConstant>(c);
}
HoloFunctionPtr phi_coordinate(int j) {
  return std::make_shared<PhiCoordinate>(j);
}
HoloFunctionPtr phi_monomial(MultiIndex a) {
  return std::make_shared<PhiMonomial>(std::move(a));
}
HoloFunctionPtr phi_laurent(int k) { return std::make_shared<PhiLaurent>(k); }

BasisDictionary BasisDictionary::monomials(int n, int max_degree) {
  BasisDictionary d;
  d.tag = "monomials d<=" + std::to_string(max_degree);
  for (const auto& a : enumerate_multiindices(n, max_degree))
    d.functions.push_back(phi_monomial(a));
  return d;
}

BasisDictionary BasisDictionary::laurent(int k_min, int k_max) {
  if (k_min > k_max) throw ParameterError("laurent dictionary: empty range");
  BasisDictionary d;
  d.tag = "laurent [" + std::to_string(k_min) + "," + std::to_string(k_max) + "]";
  for (int k = k_min; k <= k_max; ++k) d.functions.push_back(phi_laurent(k));
  return d;
}

double c_alpha(const MultiIndex& alpha, double lambda, int n) {
  if (lambda <= 0.0) throw ParameterError("c_alpha: lambda must be positive");
  const double mu = (n + 1) * lambda;
  const double log_c2 = lambda * log_ball_constant(n) +
                        log_pochhammer(mu, alpha.order()) -
                        alpha.log_factorial();
  return std::exp(0.5 * log_c2);
}

double series_tail_bound(int n, double lambda, double rho, int degree) {
  if (rho <= 0.0 || rho >= 1.0)
    throw ParameterError("series_tail_bound: rho must be in (0,1)");
  const double mu = (n + 1) * lambda;
  const double p = n + std::ceil(mu);
  const double r2 = rho * rho;
  double sum = 0.0;
  for (int k = degree + 1; k < degree + 100000; ++k) {
    const double term = std::pow(k + 1.0, p) * std::pow(r2, k);
    sum += term;
    if (term < 1e-18 * sum && k > degree + 4) break;
  }
  return std::exp(lambda * log_ball_constant(n)) * sum;
}

int choose_truncation_degree(int n, double lambda, double rho, double tol) {
  for (int deg = 0; deg <= 1000; ++deg)
    if (series_tail_bound(n, lambda, rho, deg) < 0.5 * tol) return deg;
  throw ParameterError("choose_truncation_degree: no degree up to 1000 works");
}

CoefficientTable CoefficientTable::powered_ball(int n, double lambda,
                                                int degree) {
  CoefficientTable t;
  t.n = n;
  t.lambda = lambda;
  t.degree = degree;
  for (const auto& a : enumerate_multiindices(n, degree))
    t.coeffs.emplace_back(a, c_alpha(a, lambda, n));
  return t;
}

nlohmann::json CoefficientTable::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["lambda"] = lambda;
  j["degree"] = degree;
  j["coeffs"] = nlohmann::json::array();
  for (const auto& [a, c] : coeffs)
    j["coeffs"].push_back({{"alpha", a.entries()}, {"c", c}});
  return j;
}

CoefficientTable CoefficientTable::from_json(const nlohmann::json& j) {
  std::vector<std::string> missing;
  for (const char* key : {"n", "lambda", "degree", "coeffs"})
    if (!j.contains(key)) missing.emplace_back(key);
  if (!missing.empty())
    throw ValidationError(missing, "coefficient table: missing fields");
  CoefficientTable t;
  t.n = j["n"].get<int>();
  t.lambda = j["lambda"].get<double>();
  t.degree = j["degree"].get<int>();
  for (const auto& e : j["coeffs"])
    t.coeffs.emplace_back(MultiIndex(e["alpha"].get<std::vector<int>>()),
                          e["c"].get<double>());
  return t;
}

double Kernel::polarized_clearance(const CVector& z) const {
  const double r = z.norm();
  if (r >= 1.0) return 1e-3;
  // keep <z + dz, z + dw> inside the unit disk of the pairing; up to two
  // offsets of this size may be active on each slot simultaneously
  return 0.08 * (1.0 - r * r) / std::max(r, 0.5);
}

namespace {

// ---- concrete kernels ----

class BallKernel final : public Kernel {
 public:
  explicit BallKernel(int n) : Kernel(n), c_(std::exp(log_ball_constant(n))) {}

  Complex eval_polarized(const CVector& z, const CVector& u) const override {
    const Complex denom = 1.0 - bilinear_dot(z, u);
    if (denom == Complex(0.0, 0.0))
      throw SingularityError("ball kernel: boundary contact <z,w> = 1");
    return c_ * int_power(1.0 / denom, dim() + 1);
  }

  std::optional<PotentialStructure> potential_structure() const override {
    return PotentialStructure{static_cast<double>(dim() + 1),
                              CMatrix::Identity(dim(), dim())};
  }

  std::string describe() const override {
    return "ball n=" + std::to_string(dim());
  }

 private:
  double c_;
};

class PoweredKernel final : public Kernel {
 public:
  PoweredKernel(int n, double lambda, HoloFunctionPtr phi)
      : Kernel(n), lambda_(lambda), phi_(std::move(phi)) {
    if (lambda_ <= 0.0)
      throw ParameterError("powered kernel: lambda must be positive");
    if (!phi_) phi_ = phi_one();
    log_c_ = lambda_ * log_ball_constant(n);
    mu_ = (n + 1) * lambda_;
  }

  Complex eval_polarized(const CVector& z, const CVector& u) const override {
    const Complex denom = 1.0 - bilinear_dot(z, u);
    if (denom == Complex(0.0, 0.0))
      throw SingularityError("powered kernel: boundary contact <z,w> = 1");
    // principal branch; Re(1 - <z,w>) > 0 on ball pairs
    const Complex core = std::exp(log_c_ - mu_ * std::log(denom));
    return phi_->eval(z) * phi_->eval_conj_polarized(u) * core;
  }

  std::optional<PotentialStructure> potential_structure() const override {
    // log |phi|^2 is pluriharmonic and drops out of all mixed derivatives
    return PotentialStructure{mu_, CMatrix::Identity(dim(), dim())};
  }

  std::string describe() const override {
    return "powered n=" + std::to_string(dim()) +
           " lambda=" + std::to_string(lambda_) + " phi=" + phi_->describe();
  }

 private:
  double lambda_, mu_, log_c_;
  HoloFunctionPtr phi_;
};

class EllipsoidKernel final : public Kernel {
 public:
  explicit EllipsoidKernel(HermitianForm h)
      : Kernel(h.dim()), h_(std::move(h)) {
    const int n = dim();
    c_ = std::exp(log_ball_constant(n)) * h_.matrix().determinant().real() /
         std::pow(n + 1.0, n);
    to_ball_ = hermitian_sqrt(h_.matrix()).transpose() / std::sqrt(n + 1.0);
  }

  Complex eval_polarized(const CVector& z, const CVector& u) const override {
    const Complex q = (z.transpose() * h_.matrix() * u)(0);
    const Complex denom = 1.0 - q / (dim() + 1.0);
    if (denom == Complex(0.0, 0.0))
      throw SingularityError("ellipsoid kernel: boundary contact");
    return c_ * int_power(1.0 / denom, dim() + 1);
  }

  std::optional<PotentialStructure> potential_structure() const override {
    return PotentialStructure{static_cast<double>(dim() + 1), to_ball_};
  }

  double polarized_clearance(const CVector& z) const override {
    const CVector w = to_ball_ * z;
    const double r = w.norm();
    if (r >= 1.0) return 1e-3;
    const double sigma_max = to_ball_.operatorNorm();
    return 0.08 * (1.0 - r * r) / std::max(r, 0.5) / sigma_max;
  }

  std::string describe() const override {
    return "ellipsoid n=" + std::to_string(dim());
  }

  const HermitianForm& form() const { return h_; }
  double constant() const { return c_; }

 private:
  HermitianForm h_;
  double c_;
  CMatrix to_ball_;
};

class SeriesKernel final : public Kernel {
 public:
  SeriesKernel(CoefficientTable table, HoloFunctionPtr phi)
      : Kernel(table.n), table_(std::move(table)), phi_(std::move(phi)) {
    if (!phi_) phi_ = phi_one();
  }

  Complex eval_polarized(const CVector& z, const CVector& u) const override {
    Complex acc = 0.0;
    for (const auto& [a, c] : table_.coeffs)
      acc += (c * c) * a.monomial(z) * a.monomial(u);
    return phi_->eval(z) * phi_->eval_conj_polarized(u) * acc;
  }

  std::string describe() const override {
    return "series n=" + std::to_string(dim()) +
           " N=" + std::to_string(table_.degree);
  }

 private:
  CoefficientTable table_;
  HoloFunctionPtr phi_;
};

class AnnulusKernel final : public Kernel {
 public:
  explicit AnnulusKernel(double r) : Kernel(1), r_(r) {
    if (r <= 0.0 || r >= 1.0)
      throw ParameterError("annulus kernel: inner radius must be in (0,1)");
    log_inv_r_ = std::log(1.0 / r);
  }

  double coefficient(int k) const {
    if (k == -1) return 1.0 / (2.0 * kPi * log_inv_r_);
    return (k + 1.0) / (kPi * (1.0 - std::pow(r_, 2.0 * k + 2.0)));
  }

  Complex eval_polarized(const CVector& z, const CVector& u) const override {
    const Complex t = z[0] * u[0];
    const double at = std::abs(t);
    if (at <= r_ * r_ || at >= 1.0)
      throw DomainError("annulus kernel: |z w| outside (r^2, 1)");
    Complex acc = coefficient(-1) / t;
    // nonnegative Laurent side
    Complex tk = 1.0;
    for (int k = 0; k < 100000; ++k) {
      const Complex term = coefficient(k) * tk;
      acc += term;
      tk *= t;
      if (std::abs(term) < 1e-17 * std::abs(acc) && k > 4) break;
    }
    // k <= -2 side; terms decay like (r^2/|t|)^{|k|}
    Complex tmk = 1.0 / (t * t);
    for (int k = -2; k > -100000; --k) {
      const Complex term = coefficient(k) * tmk;
      acc += term;
      tmk /= t;
      if (std::abs(term) < 1e-17 * std::abs(acc) && k < -4) break;
    }
    return acc;
  }

  double polarized_clearance(const CVector& z) const override {
    const double r = std::abs(z[0]);
    return 0.15 * std::max(1e-3, std::min(r - r_, 1.0 - r));
  }

  std::string describe() const override {
    return "annulus r=" + std::to_string(r_);
  }

 private:
  double r_, log_inv_r_;
};

class PullbackKernel final : public Kernel {
 public:
  PullbackKernel(KernelPtr base, HolomorphicMap f,
                 std::optional<DomainDescriptor> source)
      : Kernel(base->dim()),
        base_(std::move(base)),
        f_(std::move(f)),
        source_(std::move(source)) {}

  Complex eval_polarized(const CVector& z, const CVector& u) const override {
    const Complex dz = f_.jacobian_det(z);
    const Complex du = std::conj(f_.jacobian_det(u.conjugate()));
    const CVector fz = f_.eval(z);
    const CVector fu = f_.eval(u.conjugate()).conjugate();
    return dz * base_->eval_polarized(fz, fu) * du;
  }

  double polarized_clearance(const CVector& z) const override {
    double c = source_ ? source_->clearance(z) : 0.2 * (1.0 - z.norm());
    const CMatrix j = f_.jacobian(z);
    const double jn = j.operatorNorm();
    const double cb = base_->polarized_clearance(f_.eval(z)) / (jn + 1e-12);
    return 0.5 * std::max(1e-4, std::min(c, cb));
  }

  std::string describe() const override {
    return "pullback[" + f_.name + "] of " + base_->describe();
  }

 private:
  KernelPtr base_;
  HolomorphicMap f_;
  std::optional<DomainDescriptor> source_;
};

class GramKernel final : public Kernel {
 public:
  GramKernel(int n, BasisDictionary dict, CMatrix gram, std::string engine)
      : Kernel(n), dict_(std::move(dict)), engine_(std::move(engine)) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
    const double lam_min = es.eigenvalues().minCoeff();
    const double lam_max = es.eigenvalues().maxCoeff();
    if (!(lam_min > 1e-10 * lam_max))
      throw ConditioningError(
          lam_min / lam_max,
          "gram kernel: dictionary Gram matrix is numerically singular "
          "(eigenvalue ratio " +
              std::to_string(lam_min / lam_max) + ")");
    gram_inv_conj_ = gram.llt()
                         .solve(CMatrix::Identity(gram.rows(), gram.cols()))
                         .conjugate();
  }

  Complex eval_polarized(const CVector& z, const CVector& u) const override {
    const int m = dict_.size();
    CVector vz(m), vu(m);
    for (int j = 0; j < m; ++j) {
      vz[j] = dict_.functions[static_cast<std::size_t>(j)]->eval(z);
      vu[j] =
          dict_.functions[static_cast<std::size_t>(j)]->eval_conj_polarized(u);
    }
    return (vz.transpose() * gram_inv_conj_ * vu)(0);
  }

  std::string describe() const override {
    return "gram[" + dict_.tag + ", " + engine_ + "]";
  }

 private:
  BasisDictionary dict_;
  CMatrix gram_inv_conj_;
  std::string engine_;
};

CMatrix accumulate_gram(const BasisDictionary& dict,
                        const std::vector<CVector>& nodes,
                        const std::vector<double>& weights) {
  const int m = dict.size();
  CMatrix gram = CMatrix::Zero(m, m);
  const std::size_t chunk = 2048;
  CMatrix block(chunk, m);
  RVector wblock(chunk);
  std::size_t fill = 0;
  auto flush = [&]() {
    if (fill == 0) return;
    const auto rows = static_cast<Eigen::Index>(fill);
    gram.noalias() += block.topRows(rows).transpose() *
                      wblock.head(rows).asDiagonal() *
                      block.topRows(rows).conjugate();
    fill = 0;
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (int j = 0; j < m; ++j)
      block(static_cast<Eigen::Index>(fill), j) =
          dict.functions[static_cast<std::size_t>(j)]->eval(nodes[i]);
    wblock[static_cast<Eigen::Index>(fill)] = weights[i];
    if (++fill == chunk) flush();
  }
  flush();
  return (gram + gram.adjoint()) / 2.0;  // enforce exact Hermitian symmetry
}

}  // namespace

KernelPtr ball_kernel_model(int n) { return std::make_shared<BallKernel>(n); }

KernelPtr powered_kernel_model(int n, double lambda, HoloFunctionPtr phi) {
  return std::make_shared<PoweredKernel>(n, lambda, std::move(phi));
}

KernelPtr ellipsoid_kernel_model(const HermitianForm& h) {
  return std::make_shared<EllipsoidKernel>(h);
}

KernelPtr annulus_kernel_model(double inner_radius) {
  return std::make_shared<AnnulusKernel>(inner_radius);
}

KernelPtr series_kernel_model(CoefficientTable table, HoloFunctionPtr phi) {
  return std::make_shared<SeriesKernel>(std::move(table), std::move(phi));
}

KernelPtr pullback_kernel_model(KernelPtr base, HolomorphicMap f,
                                std::optional<DomainDescriptor> source) {
  return std::make_shared<PullbackKernel>(std::move(base), std::move(f),
                                          std::move(source));
}

KernelPtr gram_kernel_estimate(const DomainDescriptor& domain,
                               const BasisDictionary& dict,
                               const IntegrationConfig& cfg) {
  std::vector<CVector> nodes;
  std::vector<double> weights;
  std::string engine;
  if (cfg.engine == Engine::Quadrature) {
    if (!domain.quadrature)
      throw ParameterError("gram_kernel_estimate: domain " + domain.name +
                           " has no exact quadrature rule");
    QuadratureRule rule = domain.quadrature(cfg.quadrature_degree);
    nodes = std::move(rule.nodes);
    weights = std::move(rule.weights);
    engine = rule.tag;
  } else {
    Rng rng(cfg.seed);
    const double w = domain.box_volume() / static_cast<double>(cfg.mc_samples);
    for (std::size_t i = 0; i < cfg.mc_samples; ++i) {
      CVector z = domain.draw_box_point(rng);
      if (domain.contains(z)) {
        nodes.push_back(std::move(z));
        weights.push_back(w);
      }
    }
    if (nodes.empty())
      throw SamplingError("gram_kernel_estimate: zero accepted samples");
    engine = "mc N=" + std::to_string(cfg.mc_samples);
  }
  CMatrix gram = accumulate_gram(dict, nodes, weights);
  return std::make_shared<GramKernel>(domain.dim, dict, std::move(gram),
                                      std::move(engine));
}

Complex ball_kernel(int n, const CVector& z, const CVector& w) {
  if (z.norm() >= 1.0 || w.norm() >= 1.0)
    throw DomainError("ball_kernel: arguments must lie in the unit ball");
  if (hermitian_inner(z, w) == Complex(1.0, 0.0))
    throw SingularityError("ball_kernel: <z,w> = 1");
  return BallKernel(n).eval(z, w);
}

Complex powered_kernel(double lambda, const HoloFunctionPtr& phi, int n,
                       const CVector& z, const CVector& w) {
  return PoweredKernel(n, lambda, phi).eval(z, w);
}

Complex deriv_power_kernel(const MultiIndex& beta, double lambda, int n,
                           const CVector& w) {
  if (lambda <= 0.0)
    throw ParameterError("deriv_power_kernel: lambda must be positive");
  if (beta.order() < 1)
    throw ParameterError("deriv_power_kernel: needs |beta| >= 1");
  const double mu = (n + 1) * lambda;
  const double scale =
      std::exp(lambda * log_ball_constant(n) + log_pochhammer(mu, beta.order()));
  return scale * beta.conj_monomial(w);
}

Complex series_kernel(const CoefficientTable& table, const HoloFunctionPtr& phi,
                      const CVector& z, const CVector& w) {
  return SeriesKernel(table, phi).eval(z, w);
}

Complex annulus_kernel(double inner_radius, Complex z, Complex w) {
  if (std::abs(z) <= inner_radius || std::abs(w) <= inner_radius)
    throw DomainError("annulus_kernel: |z| must exceed the inner radius");
  if (std::abs(z) >= 1.0 || std::abs(w) >= 1.0)
    throw DomainError("annulus_kernel: arguments must lie inside |z| < 1");
  CVector zv(1), wv(1);
  zv[0] = z;
  wv[0] = w;
  return AnnulusKernel(inner_radius).eval(zv, wv);
}

double ellipsoid_kernel_constant(const HermitianForm& h) {
  const int n = h.dim();
  return std::exp(log_ball_constant(n)) * h.matrix().determinant().real() /
         std::pow(n + 1.0, n);
}

double ellipsoid_kernel_diag(const HermitianForm& h, const CVector& zeta) {
  if (h.quad(zeta) >= h.dim() + 1.0)
    throw DomainError("ellipsoid_kernel_diag: point outside E_H");
  return EllipsoidKernel(h).diagonal(zeta);
}

double transformation_law_residual(const HolomorphicMap& f, const Kernel& k_src,
                                   const Kernel& k_tgt, const CVector& z,
                                   const CVector& w) {
  const CVector fz = f.eval(z), fw = f.eval(w);
  if (f.target && !(f.target->contains(fz) && f.target->contains(fw)))
    throw DomainError("transformation_law_residual: map leaves target domain");
  const Complex lhs = k_src.eval(z, w);
  const Complex rhs =
      f.jacobian_det(z) * k_tgt.eval(fz, fw) * std::conj(f.jacobian_det(w));
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

double reproducing_residual(const Kernel& k, const DomainDescriptor& domain,
                            const IntegrationConfig& cfg,
                            const HoloFunction& f, const CVector& z) {
  const IntegralEstimate est = integrate(
      domain,
      [&](const CVector& w) { return k.eval(z, w) * f.eval(w); }, cfg);
  return std::abs(est.value - f.eval(z));
}

}  // namespace bergman
