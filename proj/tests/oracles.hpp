#pragma once

// Independent reference constructions used by the tests. Everything here is
// built from explicit 2x2 matrices and Kronecker products, so it shares no
// code with the bitmask machinery in the library.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "deepthermal/hilbert.hpp"
#include "deepthermal/rng.hpp"
#include "deepthermal/types.hpp"

namespace oracle {

using deepthermal::cplx;
using deepthermal::CMatrix;
using deepthermal::CVector;

// Single-site matrices in the (|0> = down, |1> = up) ordering.
inline CMatrix id2() { return CMatrix::Identity(2, 2); }
inline CMatrix sx() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline CMatrix sy() {
  CMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
inline CMatrix sz() {
  CMatrix m(2, 2);
  m << -1, 0, 0, 1;
  return m;
}
inline CMatrix pdown() { return 0.5 * (id2() - sz()); }
inline CMatrix nup() { return 0.5 * (id2() + sz()); }

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Product of single-site operators; ops[j] acts on site j + 1 (least significant first).
inline CMatrix product(const std::vector<CMatrix>& ops) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (const auto& op : ops) out = kron(op, out);
  return out;
}

// op on 0-based site `s` of an n-site chain.
inline CMatrix at(int n, int s, const CMatrix& op) {
  std::vector<CMatrix> ops(static_cast<std::size_t>(n), id2());
  ops[static_cast<std::size_t>(s)] = op;
  return product(ops);
}

inline CMatrix restrict_to(const CMatrix& full, const deepthermal::hilbert::BasisSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  CMatrix out(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c)
      out(r, c) = full(static_cast<Eigen::Index>(space.config(static_cast<std::size_t>(r))),
                       static_cast<Eigen::Index>(space.config(static_cast<std::size_t>(c))));
  return out;
}

inline CMatrix ising(int n, double h, double g, bool periodic = false) {
  const auto dim = Eigen::Index{1} << n;
  CMatrix H = CMatrix::Zero(dim, dim);
  for (int i = 0; i + 1 < n; ++i) H += at(n, i, sz()) * at(n, i + 1, sz());
  if (periodic) H += at(n, n - 1, sz()) * at(n, 0, sz());
  for (int i = 0; i < n; ++i) H += h * at(n, i, sz()) + g * at(n, i, sx());
  return H;
}

inline CMatrix east(int n, bool periodic = false) {
  const auto dim = Eigen::Index{1} << n;
  CMatrix H = CMatrix::Zero(dim, dim);
  H += periodic ? CMatrix(at(n, n - 1, pdown()) * at(n, 0, sx())) : at(n, 0, sx());
  for (int i = 1; i < n; ++i) H += at(n, i - 1, pdown()) * at(n, i, sx());
  return H;
}

// Open-chain PXP on the full space: X_1 P_2 + sum P X P + P_{N-1} X_N + mu sum n.
inline CMatrix pxp(int n, double mu) {
  const auto dim = Eigen::Index{1} << n;
  CMatrix H = CMatrix::Zero(dim, dim);
  H += at(n, 0, sx()) * at(n, 1, pdown());
  for (int i = 1; i + 1 < n; ++i) H += at(n, i - 1, pdown()) * at(n, i, sx()) * at(n, i + 1, pdown());
  H += at(n, n - 2, pdown()) * at(n, n - 1, sx());
  for (int i = 0; i < n; ++i) H += mu * at(n, i, nup());
  return H;
}

// Majorana chi_i, i = 1..2n: sqrt2 chi_{2k-1} = Z..Z sigma^y_k, sqrt2 chi_{2k} = Z..Z sigma^x_k.
inline CMatrix majorana(int n, int i) {
  const int k = (i - 1) / 2;
  std::vector<CMatrix> ops(static_cast<std::size_t>(n), id2());
  for (int j = 0; j < k; ++j) ops[static_cast<std::size_t>(j)] = sz();
  ops[static_cast<std::size_t>(k)] = (i % 2 == 1) ? sy() : sx();
  return product(ops) / std::numbers::sqrt2;
}

inline CMatrix syk(int n, std::uint64_t seed) {
  const int m = 2 * n;
  std::vector<CMatrix> chi;
  for (int i = 1; i <= m; ++i) chi.push_back(majorana(n, i));
  deepthermal::CounterRng rng(seed, "syk");
  const double sigma = std::sqrt(6.0 / std::pow(2.0 * n, 3));
  const auto dim = Eigen::Index{1} << n;
  CMatrix H = CMatrix::Zero(dim, dim);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int c = b + 1; c < m; ++c)
        for (int d = c + 1; d < m; ++d) H += sigma * rng.normal() * (chi[a] * chi[b] * chi[c] * chi[d]);
  return H;
}

inline CMatrix parity(int n) {
  std::vector<CMatrix> ops(static_cast<std::size_t>(n), sz());
  return product(ops);
}

// Tr_B |psi><psi| for a full-space state, A = the n_a least significant sites.
inline CMatrix partial_trace(const CVector& psi, int n, int n_a) {
  const Eigen::Index da = Eigen::Index{1} << n_a;
  const Eigen::Index db = Eigen::Index{1} << (n - n_a);
  CMatrix rho = CMatrix::Zero(da, da);
  for (Eigen::Index b = 0; b < db; ++b) {
    const CVector col = psi.segment(b * da, da);
    rho += col * col.adjoint();
  }
  return rho;
}

inline CVector random_state(Eigen::Index dim, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = cplx(nd(gen), nd(gen));
  return v.normalized();
}

// Monte-Carlo average of (|psi><psi|)^{(x)k} over Haar vectors in the product basis.
inline CMatrix haar_monte_carlo(int d, int k, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Eigen::Index dim = 1;
  for (int j = 0; j < k; ++j) dim *= d;
  CMatrix acc = CMatrix::Zero(dim, dim);
  for (std::size_t s = 0; s < samples; ++s) {
    const CVector psi = random_state(d, gen);
    CVector w = psi;
    for (int r = 1; r < k; ++r) {
      CVector next(w.size() * d);
      for (Eigen::Index j = 0; j < d; ++j) next.segment(j * w.size(), w.size()) = psi[j] * w;
      w = next;
    }
    acc.noalias() += w * w.adjoint();
  }
  return acc / static_cast<double>(samples);
}

inline double trace_norm_half(const CMatrix& a, const CMatrix& b) {
  const CMatrix d = a - b;
  Eigen::ComplexEigenSolver<CMatrix> es(d);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s += std::abs(es.eigenvalues()[i]);
  return 0.5 * s;
}

inline CMatrix expm_hermitian(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const CVector phases = (es.eigenvalues().cast<cplx>() * cplx(0, -t)).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace oracle
