#pragma once

#include "bergman/types.hpp"

namespace bergman {

/// Positive-definite Hermitian form: ellipsoid shapes, metric tensors,
/// Gram matrices. Construction checks conjugate symmetry to 1e-12.
class HermitianForm {
 public:
  explicit HermitianForm(CMatrix entries, bool require_positive_definite = true);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& matrix() const { return entries_; }

  /// Quadratic form sum_{ij} z_i h_{ij} conj(z_j); real for Hermitian input.
  double quad(const CVector& z) const;

  static HermitianForm identity(int n, double scale = 1.0);

 private:
  CMatrix entries_;
};

/// Lower-triangular A with positive real diagonal and H = A A^*.
/// Throws DefinitenessError carrying the failing pivot if H is not PD.
CMatrix hermitian_sqrt(const CMatrix& h);

inline CMatrix hermitian_sqrt(const HermitianForm& h) {
  return hermitian_sqrt(h.matrix());
}

/// max_ij |m_ij|; the norm used in reconstruction checks.
double max_abs(const CMatrix& m);

}  // namespace bergman
