#pragma once

#include <functional>
#include <vector>

#include "deepthermal/evolve.hpp"
#include "deepthermal/flip_operator.hpp"
#include "deepthermal/types.hpp"

namespace deepthermal::evolve {

struct SpectralBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// Extremal Ritz values from `steps` Lanczos iterations, widened by `margin`
/// times the width and clipped to the Gershgorin disc.
SpectralBounds lanczos_bounds(const models::FlipOperator& h, int steps = 80, double margin = 0.05);

/// J_0(x) .. J_{n-1}(x) by Miller's backward recurrence (x >= 0).
std::vector<double> bessel_j_sequence(double x, int n);

/// e^{-iHt} by Chebyshev expansion of the rescaled operator. Each call to
/// step() costs about (spectral half-width * dt + small constant) products.
class ChebyshevPropagator {
 public:
  ChebyshevPropagator(const models::FlipOperator& h, SpectralBounds bounds, double tolerance = 1e-15);
  explicit ChebyshevPropagator(const models::FlipOperator& h) : ChebyshevPropagator(h, lanczos_bounds(h)) {}

  /// psi <- e^{-iH dt} psi.
  void step(CVector& psi, double dt) const;

  /// States at each (ascending, >= 0) time, starting from psi0 at t = 0.
  void evolve_grid(const StateVector& psi0, const std::vector<double>& times,
                   const std::function<void(std::size_t, const StateVector&)>& visit) const;

  const SpectralBounds& bounds() const { return bounds_; }
  std::size_t products() const { return products_; }

 private:
  const models::FlipOperator* h_;
  SpectralBounds bounds_;
  double tolerance_;
  mutable std::size_t products_ = 0;
};

}  // namespace deepthermal::evolve
