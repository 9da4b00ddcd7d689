#include "bergman/special.hpp"

#include <cmath>
#include <limits>

#include "bergman/errors.hpp"

namespace bergman {

double log_factorial(int k) {
  if (k < 0) throw ParameterError("log_factorial: negative argument");
  return std::lgamma(static_cast<double>(k) + 1.0);
}

std::uint64_t factorial_exact(int k) {
  if (k < 0) throw ParameterError("factorial_exact: negative argument");
  if (k > 20) throw ParameterError("factorial_exact: overflows past 20!");
  std::uint64_t r = 1;
  for (int i = 2; i <= k; ++i) r *= static_cast<std::uint64_t>(i);
  return r;
}

double log_pochhammer(double mu, int m) {
  if (mu <= 0.0) throw ParameterError("log_pochhammer: mu must be positive");
  if (m < 0) throw ParameterError("log_pochhammer: negative length");
  if (m == 0) return 0.0;
  return std::lgamma(mu + m) - std::lgamma(mu);
}

double pochhammer(double mu, int m) {
  if (m <= 20) {  // short products stay exact-ish without lgamma roundoff
    double r = 1.0;
    for (int i = 0; i < m; ++i) r *= mu + i;
    return r;
  }
  return std::exp(log_pochhammer(mu, m));
}

std::uint64_t binomial_exact(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (r > std::numeric_limits<std::uint64_t>::max() / num)
      throw ParameterError("binomial_exact: overflow");
    r = r * num / static_cast<std::uint64_t>(i);
  }
  return r;
}

}  // namespace bergman
