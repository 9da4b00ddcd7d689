#include "bergman/hermitian.hpp"

#include <cmath>
#include <string>

#include "bergman/errors.hpp"

namespace bergman {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

HermitianForm::HermitianForm(CMatrix entries, bool require_positive_definite)
    : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols())
    throw ParameterError("HermitianForm: matrix not square");
  const double asym = max_abs(entries_ - entries_.adjoint());
  const double scale = std::max(1.0, max_abs(entries_));
  if (asym > 1e-12 * scale)
    throw ParameterError("HermitianForm: not conjugate-symmetric to 1e-12");
  if (require_positive_definite) hermitian_sqrt(entries_);  // throws if not PD
}

double HermitianForm::quad(const CVector& z) const {
  const Complex v = (z.transpose() * entries_ * z.conjugate())(0);
  return v.real();
}

HermitianForm HermitianForm::identity(int n, double scale) {
  return HermitianForm(scale * CMatrix::Identity(n, n));
}

CMatrix hermitian_sqrt(const CMatrix& h) {
  const int n = static_cast<int>(h.rows());
  CMatrix a = CMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    Complex s = h(j, j);
    for (int k = 0; k < j; ++k) s -= a(j, k) * std::conj(a(j, k));
    const double d = s.real();
    if (d <= 0.0 || !std::isfinite(d))
      throw DefinitenessError(
          j, "hermitian_sqrt: non-positive pivot at index " + std::to_string(j));
    a(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      Complex t = h(i, j);
      for (int k = 0; k < j; ++k) t -= a(i, k) * std::conj(a(j, k));
      a(i, j) = t / a(j, j).real();
    }
  }
  return a;
}

}  // namespace bergman
