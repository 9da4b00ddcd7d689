#pragma once

#include <functional>
#include <string>

#include "bergman/domain.hpp"
#include "bergman/types.hpp"

namespace bergman {

/// Result of a domain integral together with its provenance.
struct IntegralEstimate {
  Complex value{0.0, 0.0};
  double stderr_est = 0.0;  // zero for exact rules
  std::string engine;
  std::size_t samples = 0;
};

/// Monte Carlo integral of f over the domain: uniform box candidates with
/// membership masking, so the estimate V_box * mean(f * chi) is unbiased.
/// Deterministic given the seed.
IntegralEstimate integrate_monte_carlo(
    const DomainDescriptor& dom, const std::function<Complex(const CVector&)>& f,
    std::size_t n_samples, std::uint64_t seed);

/// Quadrature integral using the domain's exact rule when available, the
/// masked box rule otherwise.
IntegralEstimate integrate_quadrature(
    const DomainDescriptor& dom, const std::function<Complex(const CVector&)>& f,
    int degree);

/// Which engine an integral request should use.
enum class Engine { MonteCarlo, Quadrature };

struct IntegrationConfig {
  Engine engine = Engine::MonteCarlo;
  std::size_t mc_samples = 200000;
  int quadrature_degree = 12;
  std::uint64_t seed = kDefaultSeed;
};

IntegralEstimate integrate(const DomainDescriptor& dom,
                           const std::function<Complex(const CVector&)>& f,
                           const IntegrationConfig& cfg);

}  // namespace bergman
