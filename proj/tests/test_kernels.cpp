#include <doctest.h>

#include <cmath>

#include "bergman/errors.hpp"
#include "bergman/kernels.hpp"
#include "bergman/maps.hpp"
#include "bergman/rng.hpp"

using namespace bergman;

namespace {
CVector c1(Complex z) { return cvec({z}); }

std::vector<std::pair<CVector, CVector>> random_pairs(
    const DomainDescriptor& dom, int count, std::uint64_t seed) {
  const auto pts = sample_points(dom, static_cast<std::size_t>(2 * count), seed);
  std::vector<std::pair<CVector, CVector>> out;
  for (int i = 0; i < count; ++i)
    out.emplace_back(pts[static_cast<std::size_t>(2 * i)],
                     pts[static_cast<std::size_t>(2 * i + 1)]);
  return out;
}
}  // namespace

TEST_CASE("ball kernel closed form at the worked points") {
  CHECK(ball_kernel(1, c1(0.0), c1(0.0)).real() ==
        doctest::Approx(1.0 / kPi).epsilon(1e-14));
  const CVector z0 = cvec({Complex(0.0), Complex(0.0)});
  CHECK(ball_kernel(2, z0, z0).real() ==
        doctest::Approx(2.0 / (kPi * kPi)).epsilon(1e-14));
  CHECK(ball_kernel(1, c1(0.5), c1(0.5)).real() ==
        doctest::Approx(16.0 / (9.0 * kPi)).epsilon(1e-14));
}

TEST_CASE("ball kernel boundary cases raise the documented errors") {
  CHECK_THROWS_AS(ball_kernel(1, c1(1.0), c1(0.5)), DomainError);
  const auto k = ball_kernel_model(1);
  CHECK_THROWS_AS(k->eval_polarized(c1(1.0), c1(1.0)), SingularityError);
}

TEST_CASE("powered kernel reduces to the ball kernel and squares it") {
  CHECK(powered_kernel(1.0, phi_one(), 1, c1(0.0), c1(0.0)).real() ==
        doctest::Approx(1.0 / kPi).epsilon(1e-14));
  CHECK(powered_kernel(2.0, phi_one(), 1, c1(0.0), c1(0.0)).real() ==
        doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-14));
  const CVector z = cvec({Complex(0.5), Complex(0.0)});
  const Complex expect = 0.25 * ball_kernel(2, z, z);
  CHECK(std::abs(powered_kernel(1.0, phi_coordinate(0), 2, z, z) - expect) <
        1e-14);
  CHECK_THROWS_AS(powered_kernel(-1.0, phi_one(), 1, c1(0.0), c1(0.0)),
                  ParameterError);
  for (const auto& [za, wa] : random_pairs(domains::ball(2), 50, 21)) {
    const Complex a = powered_kernel(1.0, phi_one(), 2, za, wa);
    const Complex b = ball_kernel(2, za, wa);
    CHECK(std::abs(a - b) <= 1e-13 * (1.0 + std::abs(b)));
  }
}

TEST_CASE("derivative of the powered kernel at the origin") {
  const MultiIndex b1(std::vector<int>{1});
  const Complex d1 = deriv_power_kernel(b1, 1.0, 1, c1(0.3));
  CHECK(d1.real() == doctest::Approx(0.6 / kPi).epsilon(1e-13));
  {
    const double h = 1e-5;
    const auto k = ball_kernel_model(1);
    const Complex fd =
        (k->eval(c1(h), c1(0.3)) - k->eval(c1(-h), c1(0.3))) / (2.0 * h);
    CHECK(std::abs(fd - d1) <= 1e-6 * std::abs(d1));
  }
  const MultiIndex b2(std::vector<int>{2});
  const Complex d2 = deriv_power_kernel(b2, 1.0, 1, c1(0.3));
  CHECK(d2.real() == doctest::Approx(0.54 / kPi).epsilon(1e-13));
  {
    const double h = 1e-4;
    const auto k = ball_kernel_model(1);
    const Complex fd = (k->eval(c1(h), c1(0.3)) -
                        2.0 * k->eval(c1(0.0), c1(0.3)) +
                        k->eval(c1(-h), c1(0.3))) /
                       (h * h);
    CHECK(std::abs(fd - d2) <= 1e-6 * std::abs(d2));
  }
  CHECK(std::abs(deriv_power_kernel(b2, 1.5, 1, c1(0.0))) == 0.0);
  CHECK_THROWS_AS(deriv_power_kernel(MultiIndex::zero(1), 1.0, 1, c1(0.1)),
                  ParameterError);
}

TEST_CASE("series kernel converges to the closed form") {
  const auto t60 = CoefficientTable::powered_ball(1, 1.0, 60);
  const Complex s = series_kernel(t60, phi_one(), c1(0.5), c1(0.5));
  CHECK(std::abs(s - Complex(16.0 / (9.0 * kPi))) < 1e-8);

  const auto t0 = CoefficientTable::powered_ball(1, 1.0, 0);
  CHECK(series_kernel(t0, phi_one(), c1(0.0), c1(0.0)).real() ==
        doctest::Approx(1.0 / kPi).epsilon(1e-14));

  const auto t40 = CoefficientTable::powered_ball(2, 1.0, 40);
  const CVector z = cvec({Complex(0.3), Complex(0.4)});
  const Complex s2 = series_kernel(t40, phi_one(), z, z);
  CHECK(std::abs(s2 - ball_kernel(2, z, z)) < 1e-8);
}

TEST_CASE("series agrees with powered kernels for non-integer lambda") {
  Rng rng(77);
  for (int n : {1, 2})
    for (double lambda : {1.0, 1.5, 2.0}) {
      const auto table = CoefficientTable::powered_ball(n, lambda, 60);
      const auto model = series_kernel_model(table, phi_one());
      for (int trial = 0; trial < 20; ++trial) {
        CVector z(n), w(n);
        for (int i = 0; i < n; ++i) {
          z[i] = 0.5 * rng.uniform() *
                 std::exp(Complex(0.0, 2.0 * kPi * rng.uniform())) /
                 std::sqrt(double(n));
          w[i] = 0.5 * rng.uniform() *
                 std::exp(Complex(0.0, 2.0 * kPi * rng.uniform())) /
                 std::sqrt(double(n));
        }
        const Complex truth = powered_kernel(lambda, phi_one(), n, z, w);
        const Complex approx = model->eval(z, w);
        CHECK(std::abs(approx - truth) <= 1e-8 * (1.0 + std::abs(truth)));
      }
    }
}

TEST_CASE("declared truncation bound covers the observed tail") {
  CHECK(series_tail_bound(1, 1.0, 0.5, 60) < 0.5e-8);
  const int deg = choose_truncation_degree(1, 1.0, 0.5, 1e-8);
  CHECK(deg <= 60);
  CHECK(series_tail_bound(1, 1.0, 0.5, deg) < 0.5e-8);
  const auto table = CoefficientTable::powered_ball(1, 1.0, deg);
  const Complex truth = ball_kernel(1, c1(0.5), c1(0.5));
  const Complex approx = series_kernel(table, phi_one(), c1(0.5), c1(0.5));
  CHECK(std::abs(approx - truth) <= series_tail_bound(1, 1.0, 0.5, deg));
}

TEST_CASE("coefficient tables serialize to the documented JSON shape") {
  const auto table = CoefficientTable::powered_ball(2, 1.5, 3);
  const nlohmann::json j = table.to_json();
  CHECK(j["n"] == 2);
  CHECK(j["lambda"] == 1.5);
  CHECK(j["degree"] == 3);
  CHECK(j["coeffs"].is_array());
  CHECK(j["coeffs"][0].contains("alpha"));
  CHECK(j["coeffs"][0].contains("c"));
  const auto back = CoefficientTable::from_json(j);
  REQUIRE(back.coeffs.size() == table.coeffs.size());
  for (std::size_t i = 0; i < back.coeffs.size(); ++i) {
    CHECK(back.coeffs[i].first == table.coeffs[i].first);
    CHECK(back.coeffs[i].second == table.coeffs[i].second);
  }
  nlohmann::json broken = j;
  broken.erase("degree");
  CHECK_THROWS_AS(CoefficientTable::from_json(broken), ValidationError);
}

TEST_CASE("annulus kernel: coefficients, symmetry, degeneration") {
  const double r = 0.5;
  CHECK(1.0 / (kPi * (1.0 - r * r)) ==
        doctest::Approx(0.4244131815783876).epsilon(1e-12));

  // partial-sum oracle straight from the coefficient formula
  auto oracle = [r](Complex z, Complex w) {
    const Complex t = z * std::conj(w);
    Complex acc = 1.0 / (2.0 * kPi * std::log(1.0 / r)) / t;
    for (int k = -300; k <= 300; ++k) {
      if (k == -1) continue;
      acc += (k + 1.0) * std::pow(t, double(k)) /
             (kPi * (1.0 - std::pow(r, 2.0 * k + 2.0)));
    }
    return acc;
  };
  const std::vector<std::pair<Complex, Complex>> pts = {
      {Complex(0.6, 0.0), Complex(0.7, 0.0)},
      {Complex(0.0, 0.8), Complex(0.55, 0.2)},
      {Complex(-0.6, 0.1), Complex(0.3, -0.6)}};
  for (const auto& [z, w] : pts) {
    const Complex got = annulus_kernel(r, z, w);
    CHECK(std::abs(got - oracle(z, w)) <= 1e-10 * (1.0 + std::abs(got)));
  }

  const Complex a = annulus_kernel(r, Complex(0.6, 0.0), Complex(0.0, 0.7));
  const Complex b = annulus_kernel(r, Complex(0.0, 0.7), Complex(0.6, 0.0));
  CHECK(std::abs(a - std::conj(b)) <= 1e-12 * (1.0 + std::abs(a)));

  // r -> 0 approaches the disk kernel (log-slow through the k = -1 term)
  const Complex disk = ball_kernel(1, c1(0.5), c1(0.5));
  double prev = 1e300;
  for (double rr : {1e-3, 1e-6, 1e-12}) {
    const double gap = std::abs(annulus_kernel(rr, 0.5, 0.5) - disk);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 0.03);

  CHECK_THROWS_AS(annulus_kernel(r, Complex(0.4, 0.0), Complex(0.6, 0.0)),
                  DomainError);
}

TEST_CASE("ellipsoid kernel diagonal values") {
  for (int n : {1, 2, 3}) {
    const HermitianForm h = HermitianForm::identity(n, n + 1.0);
    double nfact = 1.0;
    for (int k = 2; k <= n; ++k) nfact *= k;
    CHECK(ellipsoid_kernel_diag(h, CVector::Zero(n)) ==
          doctest::Approx(nfact / std::pow(kPi, n)).epsilon(1e-13));
  }
  const HermitianForm h4 = HermitianForm::identity(1, 4.0);
  CHECK(ellipsoid_kernel_diag(h4, c1(0.0)) ==
        doctest::Approx(2.0 / kPi).epsilon(1e-13));
  CHECK(ellipsoid_kernel_diag(h4, c1(0.5)) ==
        doctest::Approx(8.0 / kPi).epsilon(1e-13));
  CHECK_THROWS_AS(ellipsoid_kernel_diag(h4, c1(0.8)), DomainError);
}

TEST_CASE("transformation law holds for the exact map families") {
  const auto pairs = random_pairs(domains::ball(2), 30, 31);
  const auto kb = ball_kernel_model(2);
  for (const auto& [z, w] : pairs)
    CHECK(transformation_law_residual(maps::identity(2), *kb, *kb, z, w) == 0.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto u = maps::unitary(
        maps::haar_unitary(2, 100 + static_cast<std::uint64_t>(trial)));
    for (const auto& [z, w] : pairs)
      CHECK(transformation_law_residual(u, *kb, *kb, z, w) <= 1e-12);
  }
  CMatrix hm(2, 2);
  hm << 4.0, Complex(0.5, 0.5), Complex(0.5, -0.5), 3.0;
  const HermitianForm h(hm);
  const auto ke = ellipsoid_kernel_model(h);
  const auto l = maps::ellipsoid_normalizer(h);
  CHECK(std::norm(l.jacobian_det(CVector::Zero(2))) ==
        doctest::Approx(hm.determinant().real() / 9.0).epsilon(1e-13));
  const auto zs = sample_points(domains::ellipsoid(h), 60, 17);
  for (std::size_t i = 0; i + 1 < zs.size(); i += 2)
    CHECK(transformation_law_residual(l, *ke, *kb, zs[i], zs[i + 1]) <= 1e-12);
}

TEST_CASE("gram estimate with exact quadrature matches the truncated series") {
  const auto dom = domains::ball(2);
  IntegrationConfig cfg;
  cfg.engine = Engine::Quadrature;
  cfg.quadrature_degree = 6;
  const auto gram =
      gram_kernel_estimate(dom, BasisDictionary::monomials(2, 6), cfg);
  const auto series =
      series_kernel_model(CoefficientTable::powered_ball(2, 1.0, 6));
  for (const auto& [z, w] : random_pairs(domains::ball(2, 0.8), 40, 53)) {
    const Complex a = gram->eval(z, w);
    const Complex b = series->eval(z, w);
    CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(b)));
  }
}

TEST_CASE("gram estimate on the punctured ball sees the full ball") {
  IntegrationConfig cfg;
  cfg.engine = Engine::Quadrature;
  cfg.quadrature_degree = 8;
  const auto dict = BasisDictionary::monomials(2, 6);
  const auto on_ball = gram_kernel_estimate(domains::ball(2), dict, cfg);
  const auto on_removed = gram_kernel_estimate(
      domains::hartogs_removed_ball(2, 0.01), dict, cfg);
  for (const auto& [z, w] : random_pairs(domains::ball(2, 0.7), 30, 7)) {
    const Complex a = on_ball->eval(z, w);
    const Complex b = on_removed->eval(z, w);
    CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("gram estimate on the annulus matches the Laurent closed form") {
  const double r = 0.5;
  const auto dom = domains::annulus(r);
  const auto dict = BasisDictionary::laurent(-10, 10);

  // dictionary-truncated closed form: sum of coef_k t^k over k in [-10,10]
  auto truncated = [r](Complex z, Complex w) {
    const Complex t = z * std::conj(w);
    Complex acc = 1.0 / (2.0 * kPi * std::log(1.0 / r)) / t;
    for (int k = -10; k <= 10; ++k) {
      if (k == -1) continue;
      acc += (k + 1.0) * std::pow(t, double(k)) /
             (kPi * (1.0 - std::pow(r, 2.0 * k + 2.0)));
    }
    return acc;
  };

  // with exact integrals the Gram estimate equals the truncated sum
  IntegrationConfig qc;
  qc.engine = Engine::Quadrature;
  qc.quadrature_degree = 12;
  const auto gram_q = gram_kernel_estimate(dom, dict, qc);
  for (Complex z : {Complex(0.6, 0.0), Complex(0.0, 0.75), Complex(-0.55, 0.1)}) {
    const Complex a = gram_q->eval(c1(z), c1(z));
    const Complex b = truncated(z, z);
    CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(b)));
  }

  // Monte Carlo Gram reaches the full closed form where the |k| > 10 tail
  // is inside the Monte Carlo tolerance (away from the inner rim)
  IntegrationConfig mc;
  mc.engine = Engine::MonteCarlo;
  mc.mc_samples = 400000;
  mc.seed = 913;
  const auto gram_mc = gram_kernel_estimate(dom, dict, mc);
  for (Complex z : {Complex(0.7, 0.0), Complex(0.0, 0.75), Complex(-0.8, 0.1)}) {
    const Complex truth = annulus_kernel(r, z, z);
    const Complex got = gram_mc->eval(c1(z), c1(z));
    CHECK(std::abs(got - truth) <= 0.05 * (1.0 + std::abs(truth)));
  }
}

TEST_CASE("gram estimation reports ill-conditioning instead of patching it") {
  BasisDictionary dict = BasisDictionary::monomials(1, 2);
  dict.functions.push_back(dict.functions.back());  // duplicate column
  IntegrationConfig cfg;
  cfg.engine = Engine::Quadrature;
  cfg.quadrature_degree = 6;
  try {
    gram_kernel_estimate(domains::ball(1), dict, cfg);
    FAIL("expected ConditioningError");
  } catch (const ConditioningError& e) {
    CHECK(e.eigenvalue_ratio <= 1e-10);
  }
}

TEST_CASE("reproducing property of the gram estimate") {
  const auto dom = domains::ball(1);
  IntegrationConfig cfg;
  cfg.engine = Engine::Quadrature;
  cfg.quadrature_degree = 8;
  const auto dict = BasisDictionary::monomials(1, 4);
  const auto k = gram_kernel_estimate(dom, dict, cfg);
  const auto zs = sample_points(domains::ball(1, 0.8), 10, 3);
  for (const auto& f : dict.functions)
    for (const auto& z : zs)
      CHECK(reproducing_residual(*k, dom, cfg, *f, z) < 1e-10);
}

TEST_CASE("Hermitian symmetry and diagonal positivity across variants") {
  struct Case {
    KernelPtr kernel;
    DomainDescriptor domain;
  };
  CMatrix hm(2, 2);
  hm << 3.0, Complex(0.0, 0.8), Complex(0.0, -0.8), 2.0;
  std::vector<Case> cases;
  cases.push_back({ball_kernel_model(2), domains::ball(2)});
  cases.push_back({powered_kernel_model(1, 1.5, phi_one()), domains::ball(1)});
  cases.push_back({powered_kernel_model(2, 1.0, phi_coordinate(1)),
                   domains::slit_ball(2)});
  cases.push_back({ellipsoid_kernel_model(HermitianForm(hm)),
                   domains::ellipsoid(HermitianForm(hm))});
  cases.push_back({annulus_kernel_model(0.5), domains::annulus(0.5)});
  cases.push_back(
      {series_kernel_model(CoefficientTable::powered_ball(1, 2.0, 30)),
       domains::ball(1, 0.8)});
  cases.push_back({pullback_kernel_model(ball_kernel_model(2),
                                         maps::blowdown_inverse(2),
                                         domains::blowdown_image(2)),
                   domains::blowdown_image(2)});
  int case_idx = 0;
  for (const auto& c : cases) {
    ++case_idx;
    for (const auto& [z, w] : random_pairs(
             c.domain, 150, 1000 + static_cast<std::uint64_t>(case_idx))) {
      const Complex a = c.kernel->eval(z, w);
      const Complex b = c.kernel->eval(w, z);
      REQUIRE(std::abs(a - std::conj(b)) <= 1e-12 * (1.0 + std::abs(a)));
      REQUIRE(c.kernel->diagonal(z) > 0.0);
    }
  }
}
