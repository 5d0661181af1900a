#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "deepthermal/hilbert.hpp"
#include "deepthermal/pauli.hpp"
#include "deepthermal/types.hpp"

namespace deepthermal::models {

enum class ModelName { Syk, Ising, East, Pxp };
enum class Perturbation { None, Pxpz, Pxpxp };

std::string to_string(ModelName name);
ModelName model_from_string(const std::string& text);
std::string to_string(Perturbation p);
Perturbation perturbation_from_string(const std::string& text);

inline const double kIsingH = 0.80901699437494742;  // (1 + sqrt 5) / 4
inline const double kIsingG = 0.90450849718747373;  // (sqrt 5 + 5) / 8
inline constexpr double kPxpMu = 0.05;
inline constexpr double kPxpzH = 0.024;
inline constexpr double kPxpxpLambda = 0.05;

struct ModelSpec {
  ModelName name = ModelName::Ising;
  int n = 2;
  hilbert::Boundary bc = hilbert::Boundary::Open;
  double h = kIsingH;
  double g = kIsingG;
  double mu = kPxpMu;
  Perturbation perturbation = Perturbation::None;
  double pxpz_h = kPxpzH;
  double pxpxp_lambda = kPxpxpLambda;
  std::uint64_t seed = 0;

  bool operator==(const ModelSpec&) const = default;

  /// Parameters that actually enter the Hamiltonian, as text.
  std::map<std::string, std::string> parameters() const;
};

/// Dense operator over a basis space with provenance metadata.
struct OperatorMatrix {
  CMatrix matrix;
  hilbert::BasisSpace space;
  std::string name;
  std::map<std::string, std::string> meta;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
  std::uint64_t hash() const;
  double hermiticity_residual() const;
  double unitarity_residual() const;
  double max_imag() const;
};

/// Hamiltonian as a Pauli sum (sites 0-based). PXP terms include their projectors.
PauliSum hamiltonian_terms(const ModelSpec& spec);

OperatorMatrix build_hamiltonian(const ModelSpec& spec, const hilbert::BasisSpace& space);

/// Majorana chi_i (1-based, i = 1..2N) after the Jordan-Wigner map:
/// sqrt2 chi_{2k-1} = Zstring_{<k} sigma^y_k, sqrt2 chi_{2k} = Zstring_{<k} sigma^x_k.
PauliSum majorana(int n_sites, int index);

enum class BasisChange { Identity, S, P, XY, Phi };
std::string to_string(BasisChange kind);
BasisChange basis_change_from_string(const std::string& text);

/// V_S = exp(-i pi/8 sum sigma^z), V_phi = exp(i phi prod sigma^z), V_P = V_{phi=-pi/8},
/// V_XY = exp(i pi/4 sum sigma^y) exp(i pi/4 sum sigma^z).
OperatorMatrix build_basis_change(BasisChange kind, double phi, const hilbert::BasisSpace& space);

/// V |psi> without forming the dense matrix (diagonal or single-site product structure).
CVector apply_basis_change(BasisChange kind, double phi, const hilbert::BasisSpace& space, const CVector& psi);

enum class Pauli { I, X, Y, Z };

/// Tensor-product Pauli string (pattern[j] acts on site j+1).
OperatorMatrix build_string_operator(std::span<const Pauli> pattern, const hilbert::BasisSpace& space);
std::vector<Pauli> pauli_pattern(const std::string& text);

struct AlgebraCheck {
  bool commutes = false;
  bool anticommutes = false;
  double commutator_residual = 0.0;
  double anticommutator_residual = 0.0;
};

inline constexpr double kAlgebraTolerance = 1e-10;

AlgebraCheck check_algebra(const OperatorMatrix& h, const OperatorMatrix& o);

}  // namespace deepthermal::models
