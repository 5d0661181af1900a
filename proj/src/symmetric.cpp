#include "deepthermal/symmetric.hpp"

#include <algorithm>
#include <cmath>

#include "deepthermal/error.hpp"

namespace deepthermal::ensemble {

double binomial(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
  return std::round(b);
}

SymmetricBasis::SymmetricBasis(int d, int k) : d_(d), k_(k) {
  if (d < 1 || k < 1) throw ValidationError("SymmetricBasis: need d >= 1 and k >= 1");
  if (binomial(d + k - 1, k) > 1e6) throw ValidationError("SymmetricBasis: dimension exceeds budget");
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  double kfact = std::tgamma(k + 1.0);
  while (true) {
    multisets_.push_back(idx);
    double denom = 1.0;
    for (int s = 0; s < k;) {
      int e = s;
      while (e < k && idx[static_cast<std::size_t>(e)] == idx[static_cast<std::size_t>(s)]) ++e;
      denom *= std::tgamma(e - s + 1.0);
      s = e;
    }
    weight_.push_back(std::sqrt(kfact / denom));
    // Next non-decreasing tuple.
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == d - 1) --pos;
    if (pos < 0) break;
    const int v = idx[static_cast<std::size_t>(pos)] + 1;
    for (int q = pos; q < k; ++q) idx[static_cast<std::size_t>(q)] = v;
  }
}

void SymmetricBasis::embed_power(const cplx* psi, cplx* out) const {
  for (std::size_t m = 0; m < multisets_.size(); ++m) {
    cplx prod = weight_[m];
    for (int i : multisets_[m]) prod *= psi[i];
    out[m] = prod;
  }
}

CVector SymmetricBasis::embed_power(const CVector& psi) const {
  if (psi.size() != d_) throw ValidationError("SymmetricBasis: vector length differs from d");
  CVector out(static_cast<Eigen::Index>(dim()));
  embed_power(psi.data(), out.data());
  return out;
}

CMatrix SymmetricBasis::isometry() const {
  const double full = std::pow(static_cast<double>(d_), k_);
  if (full > 1 << 16) throw ValidationError("SymmetricBasis: d^k exceeds budget");
  const auto rows = static_cast<Eigen::Index>(full);
  CMatrix iso = CMatrix::Zero(rows, static_cast<Eigen::Index>(dim()));
  // Sum over all product indices; each lands on exactly one multiset column.
  std::vector<int> digits(static_cast<std::size_t>(k_));
  for (Eigen::Index r = 0; r < rows; ++r) {
    Eigen::Index rem = r;
    for (int j = 0; j < k_; ++j) {
      digits[static_cast<std::size_t>(j)] = static_cast<int>(rem % d_);
      rem /= d_;
    }
    std::vector<int> sorted = digits;
    std::sort(sorted.begin(), sorted.end());
    // Rank of the sorted tuple among the enumerated multisets.
    const auto it = std::lower_bound(multisets_.begin(), multisets_.end(), sorted);
    const auto col = static_cast<Eigen::Index>(it - multisets_.begin());
    iso(r, col) = 1.0 / weight_[static_cast<std::size_t>(col)];
  }
  return iso;
}

}  // namespace deepthermal::ensemble
