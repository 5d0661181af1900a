#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deepthermal/hilbert.hpp"
#include "deepthermal/models.hpp"
#include "deepthermal/types.hpp"

namespace deepthermal::evolve {

struct StateVector {
  CVector amplitudes;
  hilbert::BasisSpace space;
  std::string label;

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes.size()); }
};

/// Eigenpairs of one diagonal block. `embed` maps block rows to parent
/// indices (empty = the block spans the whole parent space).
struct EigenBlock {
  std::vector<std::int64_t> embed;
  RVector energies;
  RMatrix real_vectors;
  CMatrix complex_vectors;
  bool real = false;

  std::size_t size() const { return static_cast<std::size_t>(energies.size()); }
};

struct EigenSystem {
  hilbert::BasisSpace space;
  std::vector<EigenBlock> blocks;
  double operator_norm_estimate = 0.0;

  std::size_t count() const;

  struct Ref {
    std::size_t block;
    std::size_t column;
    double energy;
  };
  /// All eigenpairs, ascending in energy (ties broken by block, column).
  std::vector<Ref> ordered() const;
  RVector eigenvalues() const;

  /// Eigenvector as a vector over the parent space.
  CVector vector(const Ref& ref) const;
};

/// Full spectrum of a Hermitian operator (LAPACK syevd / heevd).
/// Real symmetric input yields real eigenvectors.
EigenSystem diagonalize(const models::OperatorMatrix& h);

/// Diagonalize independent blocks of an operator that is block diagonal in
/// the parent basis. Each block lists the parent indices it covers.
EigenSystem diagonalize_blocks(const hilbert::BasisSpace& parent,
                               std::vector<std::pair<models::OperatorMatrix, std::vector<std::int64_t>>> blocks);

/// psi(t) = sum_n e^{-i E_n t} <E_n|psi0> |E_n>.
StateVector evolve_state(const EigenSystem& eig, const StateVector& psi0, double t);

/// Caches <E_n|psi0> so repeated times cost one propagation each.
class SpectralPropagator {
 public:
  SpectralPropagator(const EigenSystem& eig, const StateVector& psi0);
  StateVector at(double t) const;

 private:
  const EigenSystem* eig_;
  StateVector psi0_;
  std::vector<CVector> overlaps_;
};

// ---- initial states ----

struct InitialStateSpec {
  enum class Kind { Basis, RandomAngles, Zn, Typical, AlphaSuperposition };
  Kind kind = Kind::Basis;
  Bits config = 0;
  Bits config_b = 0;
  int zn = 2;
  bool complex = true;
  std::uint64_t seed = 0;
  std::size_t stream = 0;  // typical:<stream>
  bool fix_last_phi = false;

  bool operator==(const InitialStateSpec&) const = default;
};

std::string to_string(InitialStateSpec::Kind kind);
InitialStateSpec::Kind state_kind_from_string(const std::string& text);
std::string describe(const InitialStateSpec& spec, int n_sites);

StateVector build_initial_state(const hilbert::BasisSpace& space, const InitialStateSpec& spec);

/// prod_j (cos(theta_j/2)|up> + e^{i phi_j} sin(theta_j/2)|down>), restricted to the
/// space and renormalized.
StateVector product_state(const hilbert::BasisSpace& space, const std::vector<double>& theta,
                          const std::vector<double>& phi);

/// |Z_n> pattern: site j up iff (j-1) mod n == 0; Z_0 is all down.
Bits zn_config(int n, int n_sites);

}  // namespace deepthermal::evolve
