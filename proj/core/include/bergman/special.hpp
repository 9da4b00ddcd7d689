#pragma once

#include <cstdint>

namespace bergman {

/// log(k!) for k >= 0.
double log_factorial(int k);

/// Exact k! with overflow check; throws ParameterError for k > 20.
std::uint64_t factorial_exact(int k);

/// log of the rising factorial mu (mu+1) ... (mu+m-1); m = 0 gives 0.
/// Requires mu > 0. Stable for m up to several hundred.
double log_pochhammer(double mu, int m);

/// Rising factorial evaluated directly; overflows around m ~ 150 for mu ~ 1,
/// so callers needing large m should stay in log space.
double pochhammer(double mu, int m);

/// Binomial coefficient C(n,k) as an exact 64-bit value; throws on overflow.
std::uint64_t binomial_exact(int n, int k);

}  // namespace bergman
