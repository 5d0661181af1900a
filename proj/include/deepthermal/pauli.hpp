#pragma once

#include <vector>

#include "deepthermal/hilbert.hpp"
#include "deepthermal/types.hpp"

namespace deepthermal::models {

/// coeff * X^x Z^z, with X^x = prod_{j in x} sigma^x_j (likewise Z), Z to the right.
/// sigma^y_j = -i X_j Z_j, i.e. sigma^y|0> = i|1>.
struct PauliTerm {
  cplx coeff;
  Bits x = 0;
  Bits z = 0;
};

/// Sum of Pauli strings in (x, z) bitmask form. Sites are 0-based here.
class PauliSum {
 public:
  explicit PauliSum(int n_sites = 0) : n_(n_sites) {}

  static PauliSum identity(int n_sites, cplx c = 1.0);
  static PauliSum x(int n_sites, int site);
  static PauliSum y(int n_sites, int site);
  static PauliSum z(int n_sites, int site);
  static PauliSum down_projector(int n_sites, int site);  // (1 - sigma^z)/2
  static PauliSum number(int n_sites, int site);          // (1 + sigma^z)/2

  int sites() const { return n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  PauliSum& add(cplx coeff, Bits x, Bits z);
  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator*=(cplx s);
  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator*(cplx s, PauliSum a) { return a *= s; }
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b);

  /// Merge equal strings, drop |coeff| <= tol, sort by (x, z).
  PauliSum& simplify(double tol = 0.0);

  bool diagonal() const;

 private:
  int n_;
  std::vector<PauliTerm> terms_;
};

/// Amplitude picked up by X^x Z^z acting on |s>: (-1)^{#(z and not s)}.
inline double z_sign(Bits z, Bits s) { return (__builtin_popcountll(z & ~s) & 1) ? -1.0 : 1.0; }

/// Dense matrix of the sum restricted to `space` (transitions leaving the space are dropped).
CMatrix to_dense(const PauliSum& sum, const hilbert::BasisSpace& space);

}  // namespace deepthermal::models
