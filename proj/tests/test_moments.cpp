#include <doctest.h>

#include <cmath>

#include "bergman/errors.hpp"
#include "bergman/maps.hpp"
#include "bergman/moments.hpp"
#include "bergman/special.hpp"

using namespace bergman;

namespace {
MultiIndex mi(std::initializer_list<int> xs) {
  return MultiIndex(std::vector<int>(xs));
}
}  // namespace

TEST_CASE("orthonormalization coefficients at the worked values") {
  CHECK(c_alpha(mi({0}), 1.0, 1) ==
        doctest::Approx(std::sqrt(1.0 / kPi)).epsilon(1e-13));
  CHECK(c_alpha(mi({2}), 1.0, 1) ==
        doctest::Approx(std::sqrt(3.0 / kPi)).epsilon(1e-13));
  CHECK(c_alpha(mi({1, 0}), 1.0, 2) ==
        doctest::Approx(std::sqrt(6.0) / kPi).epsilon(1e-13));
  // lambda = 1 reduces to sqrt((n!/pi^n) (|a|+n)!/(n! a!))
  for (int n : {1, 2, 3})
    for (const auto& a : enumerate_multiindices(n, 4)) {
      double nfact = 1.0;
      for (int k = 2; k <= n; ++k) nfact *= k;
      const double expect = std::sqrt(
          nfact / std::pow(kPi, n) *
          std::exp(log_factorial(a.order() + n) - log_factorial(n) -
                   a.log_factorial()));
      CHECK(c_alpha(a, 1.0, n) == doctest::Approx(expect).epsilon(1e-12));
    }
  CHECK(c_alpha(mi({0, 0}), 2.0, 2) ==
        doctest::Approx(2.0 / (kPi * kPi)).epsilon(1e-13));
}

TEST_CASE("moment integrals on balls: pi/2, 0, pi^2/2") {
  MomentConfig mc;
  mc.mc_samples = 200000;
  mc.seed = 5;
  const auto b1 = ball_measure(1);
  const auto est = moment_integral(b1, mi({1}), mi({1}), mc);
  CHECK(std::abs(est.value.real() - kPi / 2.0) <= 3.0 * est.stderr_est);

  const auto off = moment_integral(b1, mi({1}), mi({0}), mc);
  CHECK(std::abs(off.value) <= 3.0 * off.stderr_est);

  const auto b2 = ball_measure(2);
  const auto vol = moment_integral(b2, mi({0, 0}), mi({0, 0}), mc);
  CHECK(std::abs(vol.value.real() - kPi * kPi / 2.0) <= 3.0 * vol.stderr_est);

  // quadrature engine is exact for these
  MomentConfig qc;
  qc.engine = Engine::Quadrature;
  const auto exact = moment_integral(b1, mi({1}), mi({1}), qc);
  CHECK(exact.value.real() == doctest::Approx(kPi / 2.0).epsilon(1e-12));
  CHECK(exact.stderr_est == 0.0);
}

TEST_CASE("powered-ball densities integrate to the lambda mass") {
  // total mass must be (pi^n/n!)^lambda
  for (int n : {1, 2})
    for (double lambda : {1.0, 2.0}) {
      const auto m = powered_ball_measure(n, lambda);
      MomentConfig qc;
      qc.engine = Engine::Quadrature;
      qc.quadrature_degree = 8;
      const auto mass = moment_integral(m, MultiIndex::zero(n),
                                        MultiIndex::zero(n), qc);
      double nfact = 1.0;
      for (int k = 2; k <= n; ++k) nfact *= k;
      const double expect = std::pow(std::pow(kPi, n) / nfact, lambda);
      CHECK(mass.value.real() == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("moment identity holds on the ball and slit ball, fails shrunken") {
  MomentConfig mc;
  mc.mc_samples = 150000;
  mc.seed = 11;
  for (double lambda : {1.0, 2.0}) {
    const auto res = moment_identity_residual(powered_ball_measure(1, lambda),
                                              lambda, 4, mc);
    CHECK(res.pass);
    CHECK(res.worst_ratio <= 1.0);
  }
  {
    const auto slit = lebesgue_measure(domains::slit_ball(2));
    const auto res = moment_identity_residual(slit, 1.0, 3, mc);
    CHECK(res.pass);
  }
  {
    const auto shrunk = ball_measure(1, 0.9);
    const auto res = moment_identity_residual(shrunk, 1.0, 4, mc);
    CHECK(!res.pass);
    CHECK(res.worst_ratio > 3.0);
  }
}

TEST_CASE("moment tables are Hermitian and reproducible") {
  MomentConfig mc;
  mc.mc_samples = 50000;
  mc.seed = 23;
  const auto t1 = build_moment_table(ball_measure(1), 3, mc);
  const auto t2 = build_moment_table(ball_measure(1), 3, mc);
  CHECK(t1.to_csv() == t2.to_csv());
  CHECK(t1.to_json().dump() == t2.to_json().dump());
  const std::size_t k = t1.indices.size();
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      const auto& ab = t1.at(a, b);
      const auto& ba = t1.at(b, a);
      const double se = std::hypot(ab.stderr_est, ba.stderr_est);
      CHECK(std::abs(ab.estimate - std::conj(ba.estimate)) <=
            3.0 * se + 1e-12);
    }
  const std::string csv = t1.to_csv();
  CHECK(csv.rfind("alpha,beta,re,im,stderr,engine", 0) == 0);
}

TEST_CASE("even-moment closed form at the worked values") {
  CHECK(even_moment_closed_form(1, 1.0, 1) ==
        doctest::Approx(kPi / 4.0).epsilon(1e-13));
  CHECK(even_moment_closed_form(2, 1.0, 1) ==
        doctest::Approx(kPi / 8.0).epsilon(1e-13));
  CHECK(even_moment_closed_form(1, 2.0, 1) ==
        doctest::Approx(kPi * kPi / 8.0).epsilon(1e-13));
  CHECK_THROWS_AS(even_moment_closed_form(0, 1.0, 1), ParameterError);
}

TEST_CASE("quadrature and Monte Carlo agree with the even-moment formula") {
  for (double lambda : {1.0, 2.0}) {
    const auto m = powered_ball_measure(1, lambda);
    for (int mm = 1; mm <= 5; ++mm) {
      const double expected = even_moment_closed_form(mm, lambda, 1);
      auto f = [&](const CVector& z) {
        return Complex(std::pow(z[0].real(), 2.0 * mm) * m.density_at(z), 0.0);
      };
      const auto q = integrate_quadrature(m.domain, f, 2 * mm + 4);
      CHECK(std::abs(q.value.real() - expected) <= 1e-6 * expected);
      const auto s =
          integrate_monte_carlo(m.domain, f, 200000,
                                derive_seed(77, static_cast<std::uint64_t>(mm)));
      CHECK(std::abs(s.value.real() - expected) <=
            std::max(3.0 * s.stderr_est, 0.01 * expected));
    }
  }
}

TEST_CASE("stirling ratio sequence: values, limit, monotonicity, bound") {
  const auto seq2 = stirling_ratio_sequence(2.0, 200);
  CHECK(seq2[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(std::abs(seq2.back() - std::exp(-2.0)) < 0.02);
  const auto seq3 = stirling_ratio_sequence(3.0, 200);
  CHECK(std::abs(seq3.back() - std::exp(-3.0)) < 0.02);
  for (double mu : {2.0, 3.0, 4.0}) {
    const auto seq = stirling_ratio_sequence(mu, 400);
    for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i] <= seq[i - 1]);
    const double limit = std::exp(-mu);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const double m = static_cast<double>(i + 1);
      CHECK(seq[i] - limit >= 0.0);
      CHECK(seq[i] - limit <= 0.75 * mu * mu * limit / m);
    }
  }
}

TEST_CASE("support reach: ball reaches 1, shrunken ball stays near 0.8") {
  const auto ball1 = powered_ball_measure(1, 1.0);
  const double at200 = support_reach_estimate(ball1, 200);
  CHECK(at200 >= 0.95);
  CHECK(at200 <= 1.0);
  // monotone in m_max toward 1
  CHECK(support_reach_estimate(ball1, 50) < at200);

  const auto small = ball_measure(1, 0.8);
  const double est = support_reach_estimate(small, 200);
  CHECK(est <= 0.82);
  CHECK(est >= 0.7);

  CHECK(support_reach_estimate(point_mass_measure(1), 200) == 0.0);
}

TEST_CASE("support reach by quadrature on a domain without closed forms") {
  const auto ann = lebesgue_measure(domains::annulus(0.5));
  const double est = support_reach_estimate(ann, 20);
  CHECK(est > 0.85);
  CHECK(est < 1.0);
  CHECK_THROWS_AS(support_reach_estimate(ann, 60), ParameterError);
  // a deliberately invalid (negative) density trips the diagnostic
  MomentMeasure bad = lebesgue_measure(domains::annulus(0.5));
  bad.density = [](const CVector&) { return -1.0; };
  CHECK_THROWS_AS(support_reach_estimate(bad, 5), SamplingError);
}

TEST_CASE("moment tables are invariant under unitary rotation of the domain") {
  TolerancePolicy pol;
  MomentConfig mc;
  mc.mc_samples = 100000;
  for (int dom_case = 0; dom_case < 2; ++dom_case) {
    const MomentMeasure base = dom_case == 0
                                   ? powered_ball_measure(2, 1.0)
                                   : lebesgue_measure(domains::slit_ball(2));
    mc.seed = derive_seed(31, static_cast<std::uint64_t>(dom_case));
    const auto t0 = build_moment_table(base, 3, mc);
    for (int ui = 0; ui < 3; ++ui) {
      const CMatrix u = maps::haar_unitary(
          2, derive_seed(91, static_cast<std::uint64_t>(10 * dom_case + ui)));
      MomentConfig uc = mc;
      uc.seed = derive_seed(47, static_cast<std::uint64_t>(10 * dom_case + ui));
      const auto tu = build_moment_table(unitary_pushforward(base, u), 3, uc);
      for (std::size_t c = 0; c < t0.cells.size(); ++c) {
        const double dev = std::abs(t0.cells[c].estimate - tu.cells[c].estimate);
        const double se =
            std::hypot(t0.cells[c].stderr_est, tu.cells[c].stderr_est);
        CHECK(dev <= pol.monte_carlo_bound(std::abs(t0.cells[c].estimate), se));
      }
    }
  }
}
