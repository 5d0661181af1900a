#include "deepthermal/chebyshev.hpp"

#include <algorithm>
#include <cmath>

#include "deepthermal/error.hpp"
#include "deepthermal/simd/kernels.hpp"

namespace deepthermal::evolve {

SpectralBounds lanczos_bounds(const models::FlipOperator& h, int steps, double margin) {
  const auto n = static_cast<Eigen::Index>(h.dim());
  const double g = h.gershgorin_bound();
  if (n == 0) throw ValidationError("lanczos: empty space");
  steps = static_cast<int>(std::min<Eigen::Index>(steps, n));

  // Deterministic start vector with weight on every basis state.
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i)), 0.11 * std::cos(0.7 * static_cast<double>(i)));
  v.normalize();
  CVector v_prev = CVector::Zero(n), w(n);
  std::vector<double> alpha, beta;
  double b = 0.0;
  for (int j = 0; j < steps; ++j) {
    h.apply(v.data(), w.data());
    const double a = v.dot(w).real();
    w -= a * v + b * v_prev;
    alpha.push_back(a);
    b = w.norm();
    if (b < 1e-12 * std::max(1.0, g)) break;
    beta.push_back(b);
    v_prev = v;
    v = w / b;
  }
  const auto m = static_cast<Eigen::Index>(alpha.size());
  RMatrix t = RMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    t(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(t, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()[0], hi = es.eigenvalues()[m - 1];
  const double pad = margin * std::max(hi - lo, 1e-3 * std::max(1.0, g));
  return {std::max(lo - pad, -g), std::min(hi + pad, g)};
}

std::vector<double> bessel_j_sequence(double x, int n) {
  if (n <= 0) return {};
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (x < 0.0) throw ValidationError("bessel_j_sequence: negative argument");
  // Start well above both n and x so the recurrence has settled on the
  // minimal (decaying) solution by the time it reaches the requested orders.
  int start = std::max(n, static_cast<int>(x)) + 30 + static_cast<int>(4.0 * std::cbrt(x) + std::sqrt(40.0 * std::max(n, static_cast<int>(x))));
  if (start % 2) ++start;
  std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
  j[static_cast<std::size_t>(start)] = 1e-300;
  double norm = 0.0;
  for (int k = start; k >= 1; --k) {
    j[static_cast<std::size_t>(k) - 1] = (2.0 * k / x) * j[static_cast<std::size_t>(k)] - j[static_cast<std::size_t>(k) + 1];
    if (std::abs(j[static_cast<std::size_t>(k) - 1]) > 1e250) {
      for (int q = k - 1; q <= start; ++q) j[static_cast<std::size_t>(q)] *= 1e-250;
      norm *= 1e-250;
    }
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j[static_cast<std::size_t>(k) - 1];
  }
  norm += j[0];
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = j[static_cast<std::size_t>(k)] / norm;
  return out;
}

ChebyshevPropagator::ChebyshevPropagator(const models::FlipOperator& h, SpectralBounds bounds, double tolerance)
    : h_(&h), bounds_(bounds), tolerance_(tolerance) {
  if (!(bounds.hi > bounds.lo)) throw NumericError("chebyshev: degenerate spectral bounds");
}

void ChebyshevPropagator::step(CVector& psi, double dt) const {
  if (dt == 0.0) return;
  if (dt < 0.0) throw ValidationError("chebyshev: negative time step");
  const auto n = static_cast<std::size_t>(psi.size());
  const double a = 0.5 * (bounds_.hi - bounds_.lo);
  const double b = 0.5 * (bounds_.hi + bounds_.lo);
  const double tau = a * dt;

  // Enough orders that J_k(tau) has dropped below the tolerance.
  const int orders = static_cast<int>(tau + 12.0 * std::cbrt(tau) + 40.0);
  std::vector<double> bessel = bessel_j_sequence(tau, orders);
  int used = orders;
  while (used > 1 && std::abs(bessel[static_cast<std::size_t>(used) - 1]) < tolerance_ * 1e-2) --used;

  const auto& kern = simd::active();
  CVector t_prev = psi;  // T_0 psi
  CVector t_cur(psi.size()), t_next(psi.size());
  CVector result = CVector::Zero(psi.size());
  kern.caxpy(n, cplx(bessel[0], 0.0), t_prev.data(), result.data());

  // T_1 psi = H' psi with H' = (H - b) / a.
  auto rescaled = [&](const CVector& x, CVector& y) {
    h_->apply(x.data(), y.data());
    ++products_;
    y = (y - b * x) / a;
  };
  if (used > 1) {
    rescaled(t_prev, t_cur);
    cplx phase(0.0, -1.0);  // (-i)^k
    kern.caxpy(n, 2.0 * phase * bessel[1], t_cur.data(), result.data());
    for (int k = 2; k < used; ++k) {
      rescaled(t_cur, t_next);
      t_next = 2.0 * t_next - t_prev;
      phase *= cplx(0.0, -1.0);
      kern.caxpy(n, 2.0 * phase * bessel[static_cast<std::size_t>(k)], t_next.data(), result.data());
      std::swap(t_prev, t_cur);
      std::swap(t_cur, t_next);
    }
  }
  psi = std::polar(1.0, -b * dt) * result;
  const double norm = psi.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-8 * std::max(1.0, static_cast<double>(used)))
    throw NumericError("chebyshev: norm drift " + std::to_string(norm - 1.0));
}

void ChebyshevPropagator::evolve_grid(const StateVector& psi0, const std::vector<double>& times,
                                      const std::function<void(std::size_t, const StateVector&)>& visit) const {
  if (psi0.dim() != h_->dim()) throw ValidationError("chebyshev: state and operator dimensions differ");
  StateVector cur = psi0;
  double t_cur = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_cur) throw ValidationError("chebyshev: times must be ascending and non-negative");
    step(cur.amplitudes, times[i] - t_cur);
    t_cur = times[i];
    visit(i, cur);
  }
}

}  // namespace deepthermal::evolve
