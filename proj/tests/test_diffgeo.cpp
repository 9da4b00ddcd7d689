#include <doctest.h>

#include <cmath>

#include "bergman/diffgeo.hpp"
#include "bergman/errors.hpp"
#include "bergman/kernels.hpp"
#include "bergman/maps.hpp"
#include "bergman/rng.hpp"

using namespace bergman;

namespace {

CVector random_ball_point(int n, double max_norm, Rng& rng) {
  for (;;) {
    CVector z(n);
    for (int i = 0; i < n; ++i)
      z[i] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    if (z.norm() < 1.0) return max_norm * z;
  }
}

CVector random_direction(int n, Rng& rng) {
  CVector x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.complex_normal();
  return x;
}

DerivConfig spectral_cfg() {
  DerivConfig cfg;
  cfg.path = DerivConfig::Path::Spectral;
  return cfg;
}

DerivConfig central_cfg() {
  DerivConfig cfg;
  cfg.path = DerivConfig::Path::Central;
  return cfg;
}

}  // namespace

TEST_CASE("log-kernel Hessian at the origin: (n+1) lambda times identity") {
  const auto k1 = ball_kernel_model(1);
  const auto d1 = log_kernel_derivatives(*k1, CVector::Zero(1), 2);
  CHECK(d1.d2(0, 0).real() == doctest::Approx(2.0).epsilon(1e-13));

  const auto k2 = ball_kernel_model(2);
  const auto d2 = log_kernel_derivatives(*k2, CVector::Zero(2), 2);
  CHECK(max_abs(d2.d2 - 3.0 * CMatrix::Identity(2, 2)) < 1e-13);

  const auto kp = powered_kernel_model(2, 1.5);
  const auto dp = log_kernel_derivatives(*kp, CVector::Zero(2), 2);
  CHECK(max_abs(dp.d2 - 4.5 * CMatrix::Identity(2, 2)) < 1e-13);
}

TEST_CASE("metric closed forms: ball and ellipsoid center") {
  const auto k1 = ball_kernel_model(1);
  const auto mv = bergman_metric(*k1, cvec({Complex(0.5)}));
  CHECK(mv.g(0, 0).real() == doctest::Approx(32.0 / 9.0).epsilon(1e-13));
  CHECK(max_abs(mv.g * mv.g_inv - CMatrix::Identity(1, 1)) <= 1e-10);

  for (int n : {1, 2, 3}) {
    const auto k = ball_kernel_model(n);
    const auto at0 = bergman_metric(*k, CVector::Zero(n));
    CHECK(max_abs(at0.g - (n + 1.0) * CMatrix::Identity(n, n)) < 1e-12);
  }

  CMatrix hm(2, 2);
  hm << 4.0, Complex(0.5, 0.5), Complex(0.5, -0.5), 3.0;
  const HermitianForm h(hm);
  const auto ke = ellipsoid_kernel_model(h);
  const auto mv_e = bergman_metric(*ke, CVector::Zero(2));
  CHECK(max_abs(mv_e.g - hm) < 1e-12);
}

TEST_CASE("analytic ball metric equals the closed-form matrix") {
  Rng rng(5);
  const auto k = ball_kernel_model(2);
  for (int t = 0; t < 25; ++t) {
    const CVector z = random_ball_point(2, 0.7, rng);
    const auto mv = bergman_metric(*k, z);
    CHECK(max_abs(mv.g - ball_metric_closed_form(z)) <
          1e-11 * max_abs(mv.g));
  }
}

TEST_CASE("curvature tensor of the ball at the origin") {
  const auto k2 = ball_kernel_model(2);
  const auto t = curvature_tensor(*k2, CVector::Zero(2));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double expected =
              -3.0 * ((i == j && a == b ? 1.0 : 0.0) +
                      (i == b && j == a ? 1.0 : 0.0));
          CHECK(std::abs(t.at(i, j, a, b) - expected) < 1e-12);
        }
  const auto k1 = ball_kernel_model(1);
  const auto t1 = curvature_tensor(*k1, CVector::Zero(1));
  CHECK(t1.at(0, 0, 0, 0).real() == doctest::Approx(-4.0).epsilon(1e-13));
}

TEST_CASE("powered kernel scales the tensor by lambda and H by 1/lambda") {
  const double lambda = 2.0;
  const auto kb = ball_kernel_model(2);
  const auto kp = powered_kernel_model(2, lambda);
  Rng rng(17);
  const CVector z = random_ball_point(2, 0.5, rng);
  const auto tb = curvature_tensor(*kb, z);
  const auto tp = curvature_tensor(*kp, z);
  for (std::size_t i = 0; i < tb.r.size(); ++i)
    CHECK(std::abs(tp.r[i] - lambda * tb.r[i]) <=
          1e-10 * (1.0 + std::abs(tb.r[i])));
  const CVector x = random_direction(2, rng);
  CHECK(sectional_curvature(*kp, z, x) ==
        doctest::Approx(-2.0 / (lambda * 3.0)).epsilon(1e-10));
}

TEST_CASE("ball sectional curvature anchor: -2/(n+1) for n = 1,2,3") {
  for (int n : {1, 2, 3}) {
    const auto k = ball_kernel_model(n);
    Rng rng(static_cast<std::uint64_t>(n));
    for (int t = 0; t < 50; ++t) {
      const CVector z = random_ball_point(n, 0.7, rng);
      const CVector x = random_direction(n, rng);
      const double h = sectional_curvature(*k, z, x);
      CHECK(std::abs(h - (-2.0 / (n + 1))) < 1e-6);
    }
  }
}

TEST_CASE("numeric engines reproduce the analytic metric and tensor to 1e-8") {
  const auto k = ball_kernel_model(2);
  Rng rng(23);
  for (int t = 0; t < 6; ++t) {
    const CVector z = random_ball_point(2, 0.7, rng);
    const auto da = log_kernel_derivatives(*k, z, 4);
    const auto ds = log_kernel_derivatives(*k, z, 4, spectral_cfg());
    CHECK(max_abs(ds.d2 - da.d2) <= 1e-8 * (1.0 + max_abs(da.d2)));
    double scale3 = 1.0, scale4 = 1.0;
    for (const auto& v : da.d3) scale3 = std::max(scale3, std::abs(v));
    for (const auto& v : da.d4) scale4 = std::max(scale4, std::abs(v));
    for (std::size_t i = 0; i < da.d3.size(); ++i)
      CHECK(std::abs(ds.d3[i] - da.d3[i]) <= 1e-8 * scale3);
    for (std::size_t i = 0; i < da.d4.size(); ++i)
      CHECK(std::abs(ds.d4[i] - da.d4[i]) <= 1e-8 * scale4);

    const auto ta = curvature_tensor(*k, z);
    const auto ts = curvature_tensor(*k, z, spectral_cfg());
    double tensor_scale = 1.0;
    for (const auto& v : ta.r) tensor_scale = std::max(tensor_scale, std::abs(v));
    for (std::size_t i = 0; i < ta.r.size(); ++i)
      CHECK(std::abs(ts.r[i] - ta.r[i]) <= 1e-8 * tensor_scale);
    CHECK(ts.kahler_symmetry_residual() <= 1e-8);
  }
}

TEST_CASE("central differences recover the anchor to 1e-5") {
  for (int n : {1, 2, 3}) {
    const auto k = ball_kernel_model(n);
    Rng rng(100 + static_cast<std::uint64_t>(n));
    for (int t = 0; t < 10; ++t) {
      const CVector z = random_ball_point(n, 0.7, rng);
      const CVector x = random_direction(n, rng);
      const double h = sectional_curvature(*k, z, x, central_cfg());
      CHECK(std::abs(h - (-2.0 / (n + 1))) < 1e-5);
    }
  }
}

TEST_CASE("sectional curvature is invariant under complex scaling of X") {
  const auto k = ball_kernel_model(2);
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const CVector z = random_ball_point(2, 0.7, rng);
    const CVector x = random_direction(2, rng);
    const Complex c = (0.1 + 3.0 * rng.uniform()) *
                      std::exp(Complex(0.0, 2.0 * kPi * rng.uniform()));
    const double h1 = sectional_curvature(*k, z, x);
    const double h2 = sectional_curvature(*k, z, c * x);
    CHECK(std::abs(h1 - h2) < 1e-10);
  }
}

TEST_CASE("directional probe agrees with the tensor contraction") {
  const auto k = pullback_kernel_model(ball_kernel_model(2),
                                       maps::blowdown_inverse(2),
                                       domains::blowdown_image(2));
  const auto dom = domains::blowdown_image(2);
  Rng rng(41);
  int done = 0;
  while (done < 4) {
    const CVector z = sample_one(dom, rng.next_u64());
    if (dom.clearance(z) < 0.05) continue;
    ++done;
    const CVector x = random_direction(2, rng);
    DerivConfig cfg = spectral_cfg();
    cfg.domain_clearance = dom.clearance;
    const double h_dir = sectional_curvature(*k, z, x, cfg);
    const auto cv = curvature_at(*k, z, x, cfg);
    CHECK(std::abs(h_dir - cv.sectional) < 1e-7);
  }
}

TEST_CASE("curvature scans: ball and slit ball are constant, annulus is not") {
  const auto k2 = ball_kernel_model(2);
  ScanOptions opt;
  opt.min_clearance = 0.05;
  const auto ball_rep = curvature_scan(*k2, domains::ball(2), 200, 7, opt);
  CHECK(ball_rep.spread <= 1e-6);
  CHECK(ball_rep.mean_h == doctest::Approx(-2.0 / 3.0).epsilon(1e-8));
  CHECK(ball_rep.constant);

  ScanOptions slit_opt;
  slit_opt.min_clearance = 0.02;
  slit_opt.point_filter = [](const CVector& z) {
    return std::abs(z[1]) >= 0.05;
  };
  const auto slit_rep =
      curvature_scan(*k2, domains::slit_ball(2), 200, 11, slit_opt);
  CHECK(slit_rep.spread <= 1e-6);
  CHECK(slit_rep.mean_h == doctest::Approx(-2.0 / 3.0).epsilon(1e-8));

  // The r = 0.5 annulus is a sharp stress test: its Bergman metric agrees
  // with the hyperbolic metric up to a defect of order exp(-2 pi^2/log(1/r))
  // ~ 1e-12, so the measured curvature is -1 with spread ~1e-10. A scan
  // must NOT report spurious variation here.
  const auto ka = annulus_kernel_model(0.5);
  ScanOptions ann_opt;
  ann_opt.min_clearance = 0.04;
  ann_opt.deriv = spectral_cfg();
  const auto ann_rep =
      curvature_scan(*ka, domains::annulus(0.5), 60, 13, ann_opt);
  CHECK(ann_rep.spread <= 1e-6);
  CHECK(ann_rep.mean_h == doctest::Approx(-1.0).epsilon(1e-7));

  // a series kernel with a doctored coefficient is not a ball kernel and
  // the scan must expose its non-constant curvature
  CoefficientTable doctored = CoefficientTable::powered_ball(1, 1.0, 25);
  for (auto& [a, c] : doctored.coeffs)
    if (a.order() == 1) c *= 2.0;
  const auto kd = series_kernel_model(doctored);
  ScanOptions pert_opt;
  pert_opt.min_clearance = 0.45;  // keep truncation error irrelevant
  pert_opt.deriv = spectral_cfg();
  const auto pert_rep =
      curvature_scan(*kd, domains::ball(1), 60, 13, pert_opt);
  CHECK(pert_rep.spread > 0.1);
  CHECK(!pert_rep.constant);
}

TEST_CASE("scan reports are deterministic and serialize with a footer") {
  const auto k = ball_kernel_model(1);
  ScanOptions opt;
  const auto a = curvature_scan(*k, domains::ball(1), 25, 99, opt);
  const auto b = curvature_scan(*k, domains::ball(1), 25, 99, opt);
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(a.to_csv() == b.to_csv());
  const std::string csv = a.to_csv();
  CHECK(csv.find("re_z1") != std::string::npos);
  CHECK(csv.find("# footer") != std::string::npos);
  CHECK(csv.find("spread=") != std::string::npos);
}

TEST_CASE("isometry residuals: identity, unitary, representative map") {
  const auto kb = ball_kernel_model(2);
  Rng rng(3);
  const CVector z = random_ball_point(2, 0.6, rng);
  CHECK(isometry_residual(maps::identity(2), *kb, *kb, z) == 0.0);
  for (int t = 0; t < 5; ++t) {
    const auto u = maps::unitary(
        maps::haar_unitary(2, 400 + static_cast<std::uint64_t>(t)));
    const CVector w = random_ball_point(2, 0.7, rng);
    CHECK(isometry_residual(u, *kb, *kb, w) <= 1e-10);
  }
  // closed-form representative map into E_{g(p)}
  const CVector p = cvec({Complex(0.3, 0.1), Complex(-0.2, 0.2)});
  const auto tp = maps::ball_representative_map(2, p);
  const HermitianForm gp(bergman_metric(*kb, p).g);
  const auto ke = ellipsoid_kernel_model(gp);
  for (int t = 0; t < 10; ++t) {
    const CVector w = random_ball_point(2, 0.7, rng);
    CHECK(isometry_residual(tp, *kb, *ke, w) <= 1e-6);
  }
}

TEST_CASE("degenerate log-Hessian is reported, not silently inverted") {
  // K = c^2 z conj(w): log K(z,z) is harmonic, the metric degenerates
  CoefficientTable t;
  t.n = 1;
  t.lambda = 1.0;
  t.degree = 1;
  t.coeffs.emplace_back(MultiIndex(std::vector<int>{1}), 1.0);
  const auto k = series_kernel_model(t);
  CHECK_THROWS_AS(bergman_metric(*k, cvec({Complex(0.5)}), spectral_cfg()),
                  Error);
}

TEST_CASE("stencils that would leave the domain raise a geometry error") {
  const auto k = ball_kernel_model(1);
  DerivConfig cfg = spectral_cfg();
  cfg.domain_clearance = [](const CVector&) { return 0.0; };
  CHECK_THROWS_AS(log_kernel_derivatives(*k, cvec({Complex(0.2)}), 2, cfg),
                  GeometryError);
}
