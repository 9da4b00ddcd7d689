#include <doctest.h>

#include <cmath>

#include "bergman/errors.hpp"
#include "bergman/integrate.hpp"

using namespace bergman;

TEST_CASE("Monte Carlo integral covers the disk area within 3 sigma") {
  const auto disk = domains::ball(1);
  const auto est = integrate_monte_carlo(
      disk, [](const CVector&) { return Complex(1.0, 0.0); }, 200000, 11);
  CHECK(std::abs(est.value.real() - kPi) <= 3.0 * est.stderr_est);
  CHECK(est.stderr_est > 0.0);
  CHECK(est.engine == "mc");
}

TEST_CASE("Monte Carlo matches the radial moment pi/2 on the disk") {
  const auto disk = domains::ball(1);
  const auto est = integrate_monte_carlo(
      disk,
      [](const CVector& z) { return Complex(std::norm(z[0]), 0.0); }, 400000,
      5);
  CHECK(std::abs(est.value.real() - kPi / 2.0) <= 3.0 * est.stderr_est);
}

TEST_CASE("quadrature engine uses the exact rule when present") {
  const auto disk = domains::ball(1);
  const auto est = integrate_quadrature(
      disk, [](const CVector& z) { return Complex(std::norm(z[0]), 0.0); }, 6);
  CHECK(est.value.real() == doctest::Approx(kPi / 2.0).epsilon(1e-13));
  CHECK(est.stderr_est == 0.0);
}

TEST_CASE("box-masked fallback carries a refinement error estimate") {
  DomainDescriptor disk = domains::ball(1);
  disk.quadrature = nullptr;
  const auto est = integrate_quadrature(
      disk, [](const CVector&) { return Complex(1.0, 0.0); }, 10);
  CHECK(std::abs(est.value.real() - kPi) < 0.05);
  CHECK(est.stderr_est > 0.0);
}

TEST_CASE("equal seeds give identical estimates") {
  const auto disk = domains::ball(1);
  auto f = [](const CVector& z) { return z[0]; };
  const auto a = integrate_monte_carlo(disk, f, 50000, 99);
  const auto b = integrate_monte_carlo(disk, f, 50000, 99);
  CHECK(a.value == b.value);
  CHECK(a.stderr_est == b.stderr_est);
}

TEST_CASE("all-rejected sampling raises a sampling error") {
  DomainDescriptor empty = domains::ball(1);
  empty.contains = [](const CVector&) { return false; };
  CHECK_THROWS_AS(integrate_monte_carlo(
                      empty, [](const CVector&) { return Complex(1.0); }, 1000, 1),
                  SamplingError);
}
