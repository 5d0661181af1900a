#include "deepthermal/flip_operator.hpp"

#include <algorithm>

#include "deepthermal/error.hpp"
#include "deepthermal/simd/kernels.hpp"

namespace deepthermal::models {

FlipOperator::FlipOperator(const PauliSum& sum, const hilbert::BasisSpace& space)
    : space_(space), dim_(space.dim()) {
  if (sum.sites() != space.sites()) throw ValidationError("FlipOperator: operator and space disagree on N");
  PauliSum sorted = sum;
  sorted.simplify();
  const bool identity = space.identity_indexed();
  const auto& terms = sorted.terms();
  for (std::size_t t = 0; t < terms.size();) {
    Group g;
    g.mask = terms[t].x;
    g.weight.assign(dim_, cplx(0.0));
    std::size_t u = t;
    for (; u < terms.size() && terms[u].x == g.mask; ++u)
      for (std::size_t i = 0; i < dim_; ++i) g.weight[i] += terms[u].coeff * z_sign(terms[u].z, space.config(i));
    t = u;
    if (!identity) {
      g.target.resize(dim_);
      for (std::size_t i = 0; i < dim_; ++i) {
        const auto j = space.index_of(space.config(i) ^ g.mask);
        g.target[i] = static_cast<std::int32_t>(j);
        if (j < 0) g.weight[i] = 0.0;
      }
    }
    groups_.push_back(std::move(g));
  }
}

void FlipOperator::apply(const cplx* x, cplx* y) const {
  std::fill(y, y + dim_, cplx(0.0));
  const auto& k = simd::active();
  for (const auto& g : groups_) {
    if (g.target.empty()) {
      k.flip_apply(dim_, g.mask, g.weight.data(), x, y);
    } else {
      for (std::size_t i = 0; i < dim_; ++i)
        if (g.target[i] >= 0) y[g.target[i]] += g.weight[i] * x[i];
    }
  }
}

CVector FlipOperator::apply(const CVector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_) throw ValidationError("FlipOperator: vector size mismatch");
  CVector y(x.size());
  apply(x.data(), y.data());
  return y;
}

double FlipOperator::gershgorin_bound() const {
  // Column sums equal row sums for a Hermitian operator.
  std::vector<double> col(dim_, 0.0);
  for (const auto& g : groups_)
    for (std::size_t i = 0; i < dim_; ++i) col[i] += std::abs(g.weight[i]);
  return col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
}

}  // namespace deepthermal::models
