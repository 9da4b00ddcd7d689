#include "bergman/multi_index.hpp"

#include <numeric>
#include <string>

#include "bergman/errors.hpp"
#include "bergman/special.hpp"

namespace bergman {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_)
    if (e < 0) throw ParameterError("MultiIndex: negative entry");
}

int MultiIndex::order() const {
  return std::accumulate(entries_.begin(), entries_.end(), 0);
}

double MultiIndex::log_factorial() const {
  double s = 0.0;
  for (int e : entries_) s += bergman::log_factorial(e);
  return s;
}

Complex MultiIndex::monomial(const CVector& z) const {
  Complex r = 1.0;
  for (int i = 0; i < dim(); ++i) {
    const Complex zi = z[i];
    for (int k = 0; k < entries_[static_cast<std::size_t>(i)]; ++k) r *= zi;
  }
  return r;
}

Complex MultiIndex::conj_monomial(const CVector& z) const {
  return std::conj(monomial(z));
}

bool MultiIndex::operator<(const MultiIndex& o) const {
  if (order() != o.order()) return order() < o.order();
  return entries_ > o.entries_;  // larger leading exponents come first
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (int i = 0; i < dim(); ++i) {
    if (i) s += ",";
    s += std::to_string(entries_[static_cast<std::size_t>(i)]);
  }
  return s + ")";
}

namespace {
void compositions(int n, int degree, std::vector<int>& prefix,
                  std::vector<MultiIndex>& out) {
  if (n == 1) {
    prefix.push_back(degree);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int head = degree; head >= 0; --head) {
    prefix.push_back(head);
    compositions(n - 1, degree - head, prefix, out);
    prefix.pop_back();
  }
}
}  // namespace

std::vector<MultiIndex> enumerate_multiindices(int n, int max_degree) {
  if (n < 1) throw ParameterError("enumerate_multiindices: n must be >= 1");
  if (max_degree < 0)
    throw ParameterError("enumerate_multiindices: negative degree");
  std::vector<MultiIndex> out;
  out.reserve(binomial_exact(max_degree + n, n));
  std::vector<int> prefix;
  for (int d = 0; d <= max_degree; ++d) compositions(n, d, prefix, out);
  return out;
}

}  // namespace bergman
