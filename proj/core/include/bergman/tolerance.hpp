#pragma once

#include <algorithm>
#include <cmath>

#include "bergman/errors.hpp"

namespace bergman {

/// Per-check-class tolerances. Monte Carlo comparisons pass at three
/// estimated standard errors or 1% relative, whichever is larger.
struct TolerancePolicy {
  double closed_form = 1e-12;
  double fd_derivative = 1e-6;
  double monte_carlo_sigma = 3.0;
  double monte_carlo_rel = 0.01;

  void validate() const {
    if (closed_form <= 0 || fd_derivative <= 0 || monte_carlo_sigma <= 0 ||
        monte_carlo_rel <= 0)
      throw ParameterError("TolerancePolicy: tolerances must be positive");
  }

  /// Monte Carlo acceptance bound for a value with expected magnitude
  /// |expected| and estimated standard error stderr.
  double monte_carlo_bound(double expected_mag, double stderr_est) const {
    return std::max(monte_carlo_sigma * stderr_est,
                    monte_carlo_rel * expected_mag);
  }

  bool monte_carlo_ok(double deviation, double expected_mag,
                      double stderr_est) const {
    return deviation <= monte_carlo_bound(expected_mag, stderr_est);
  }
};

}  // namespace bergman
