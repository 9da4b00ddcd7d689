#pragma once

#include <functional>
#include <optional>
#include <string>

#include "bergman/domain.hpp"
#include "bergman/types.hpp"

namespace bergman {

/// Dimension-preserving holomorphic map with a Jacobian evaluator.
/// Analytic Jacobians where known; numeric fallback is wired up by
/// maps::with_numeric_jacobian.
struct HolomorphicMap {
  int dim = 0;
  std::string name;
  std::function<CVector(const CVector&)> eval;
  std::function<CMatrix(const CVector&)> jacobian;
  std::optional<DomainDescriptor> source;
  std::optional<DomainDescriptor> target;

  CVector operator()(const CVector& z) const { return eval(z); }
  Complex jacobian_det(const CVector& z) const {
    return jacobian(z).determinant();
  }
};

}  // namespace bergman
