#pragma once

#include <complex>
#include <cstdint>
#include <Eigen/Dense>

namespace bergman {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Hermitian pairing <z,w> = sum_j z_j * conj(w_j).
inline Complex hermitian_inner(const CVector& z, const CVector& w) {
  return w.dot(z);  // Eigen dot conjugates the first argument
}

inline double sq_norm(const CVector& z) { return z.squaredNorm(); }

inline CVector cvec(std::initializer_list<Complex> xs) {
  CVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const auto& x : xs) v[i++] = x;
  return v;
}

/// Default master seed for every seeded computation in the project.
/// Spelled from the tool's name: byte 0xB3 followed by ASCII "RGMAN".
inline constexpr std::uint64_t kDefaultSeed = 0xB352474D414EULL;

}  // namespace bergman
