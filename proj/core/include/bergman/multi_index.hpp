#pragma once

#include <vector>

#include "bergman/types.hpp"

namespace bergman {

/// Exponent vector a = (a_1,...,a_n) indexing monomials z^a and moments.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);
  static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(n, 0)); }

  int dim() const { return static_cast<int>(entries_.size()); }
  int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& entries() const { return entries_; }

  /// Total degree |a|.
  int order() const;

  /// log(a!) = sum_i log(a_i!); never overflows.
  double log_factorial() const;

  /// z^a.
  Complex monomial(const CVector& z) const;

  /// conj(z)^a.
  Complex conj_monomial(const CVector& z) const;

  bool operator==(const MultiIndex& o) const { return entries_ == o.entries_; }

  /// Graded lexicographic: first by |a|, then lexicographically with the
  /// leading entry most significant.
  bool operator<(const MultiIndex& o) const;

  std::string to_string() const;

 private:
  std::vector<int> entries_;
};

/// All multi-indices of dimension n with |a| <= max_degree, in graded
/// lexicographic order. Size is C(max_degree + n, n).
std::vector<MultiIndex> enumerate_multiindices(int n, int max_degree);

}  // namespace bergman
