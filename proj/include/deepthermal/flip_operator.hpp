#pragma once

#include <cstdint>
#include <vector>

#include "deepthermal/hilbert.hpp"
#include "deepthermal/pauli.hpp"
#include "deepthermal/types.hpp"

namespace deepthermal::models {

/// Matrix-free form of a Pauli sum on a basis space: one diagonal weight
/// vector per distinct flip mask, so H|s> = sum_mask w_mask(s) |s ^ mask>.
/// Used by the Chebyshev propagator where dense diagonalization is too large.
class FlipOperator {
 public:
  FlipOperator(const PauliSum& sum, const hilbert::BasisSpace& space);

  std::size_t dim() const { return dim_; }
  std::size_t mask_count() const { return groups_.size(); }
  const hilbert::BasisSpace& space() const { return space_; }

  /// y = H x (y is overwritten).
  void apply(const cplx* x, cplx* y) const;
  CVector apply(const CVector& x) const;

  /// Max absolute row sum; bounds the spectral radius.
  double gershgorin_bound() const;

 private:
  struct Group {
    Bits mask = 0;
    std::vector<cplx> weight;
    std::vector<std::int32_t> target;  // empty when the space is identity indexed
  };

  hilbert::BasisSpace space_;
  std::size_t dim_ = 0;
  std::vector<Group> groups_;
};

}  // namespace deepthermal::models
