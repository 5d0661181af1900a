#pragma once

#include <cstdint>
#include <vector>

#include "deepthermal/types.hpp"

namespace deepthermal::ensemble {

/// Orthonormal basis of the symmetric subspace Sym^k(C^d).
///
/// Basis vector m corresponds to a multiset of k indices (stored sorted) and
/// equals the normalized symmetrization of |i_1 ... i_k>. For any psi,
/// <m| psi^{(x)k} = sqrt(k! / prod_i m_i!) prod_j psi_{i_j}.
class SymmetricBasis {
 public:
  SymmetricBasis(int d, int k);

  int d() const { return d_; }
  int k() const { return k_; }
  std::size_t dim() const { return multisets_.size(); }
  const std::vector<int>& multiset(std::size_t m) const { return multisets_[m]; }

  /// Coordinates of psi^{(x)k} in this basis.
  CVector embed_power(const CVector& psi) const;
  void embed_power(const cplx* psi, cplx* out) const;

  /// d^k x dim isometry onto the product basis (index i_1 + d i_2 + ... ).
  CMatrix isometry() const;

 private:
  int d_;
  int k_;
  std::vector<std::vector<int>> multisets_;
  std::vector<double> weight_;  // sqrt(k! / prod m_i!)
};

/// binom(n, r) as a double (exact for the sizes used here).
double binomial(int n, int r);

}  // namespace deepthermal::ensemble
