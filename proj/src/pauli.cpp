#include "deepthermal/pauli.hpp"

#include <algorithm>
#include <bit>

#include "deepthermal/error.hpp"

namespace deepthermal::models {

namespace {
Bits site_bit(int n, int site) {
  if (site < 0 || site >= n) throw ValidationError("pauli: site out of range");
  return Bits{1} << site;
}
}  // namespace

PauliSum PauliSum::identity(int n, cplx c) { return PauliSum(n).add(c, 0, 0); }
PauliSum PauliSum::x(int n, int site) { return PauliSum(n).add(1.0, site_bit(n, site), 0); }
PauliSum PauliSum::y(int n, int site) {
  const Bits b = site_bit(n, site);
  return PauliSum(n).add(cplx(0.0, -1.0), b, b);
}
PauliSum PauliSum::z(int n, int site) { return PauliSum(n).add(1.0, 0, site_bit(n, site)); }
PauliSum PauliSum::down_projector(int n, int site) {
  return PauliSum(n).add(0.5, 0, 0).add(-0.5, 0, site_bit(n, site));
}
PauliSum PauliSum::number(int n, int site) { return PauliSum(n).add(0.5, 0, 0).add(0.5, 0, site_bit(n, site)); }

PauliSum& PauliSum::add(cplx coeff, Bits x, Bits z) {
  terms_.push_back({coeff, x, z});
  return *this;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.n_ != n_) throw ValidationError("pauli: site count mismatch");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

PauliSum& PauliSum::operator*=(cplx s) {
  for (auto& t : terms_) t.coeff *= s;
  return *this;
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  if (a.n_ != b.n_) throw ValidationError("pauli: site count mismatch");
  PauliSum out(a.n_);
  out.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& ta : a.terms_)
    for (const auto& tb : b.terms_) {
      // Z^{z1} X^{x2} = (-1)^{|z1 & x2|} X^{x2} Z^{z1}
      const double sign = (std::popcount(ta.z & tb.x) & 1) ? -1.0 : 1.0;
      out.terms_.push_back({ta.coeff * tb.coeff * sign, ta.x ^ tb.x, ta.z ^ tb.z});
    }
  return out.simplify();
}

PauliSum& PauliSum::simplify(double tol) {
  std::sort(terms_.begin(), terms_.end(),
            [](const PauliTerm& l, const PauliTerm& r) { return l.x != r.x ? l.x < r.x : l.z < r.z; });
  std::vector<PauliTerm> merged;
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().x == t.x && merged.back().z == t.z)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [tol](const PauliTerm& t) { return std::abs(t.coeff) <= tol; });
  terms_ = std::move(merged);
  return *this;
}

bool PauliSum::diagonal() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const PauliTerm& t) { return t.x == 0; });
}

CMatrix to_dense(const PauliSum& sum, const hilbert::BasisSpace& space) {
  if (sum.sites() != space.sites()) throw ValidationError("to_dense: operator and space disagree on N");
  const auto dim = static_cast<Eigen::Index>(space.dim());
  CMatrix m = CMatrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Bits s = space.config(static_cast<std::size_t>(col));
    for (const auto& t : sum.terms()) {
      const auto row = space.index_of(s ^ t.x);
      if (row < 0) continue;
      m(row, col) += t.coeff * z_sign(t.z, s);
    }
  }
  return m;
}

}  // namespace deepthermal::models
