#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "deepthermal/evolve.hpp"
#include "deepthermal/hilbert.hpp"
#include "deepthermal/models.hpp"
#include "deepthermal/symmetric.hpp"
#include "deepthermal/types.hpp"

namespace deepthermal::ensemble {

inline constexpr double kDefaultPFloor = 1e-14;

/// Largest d^k accepted for a moment, whichever basis holds it.
inline constexpr double kProductBudget = 65536.0;

struct Entry {
  Bits zb = 0;  // over B sites, bit 0 = site N_A + 1
  double p = 0.0;
  CVector psi;  // over the A space
};

struct ProjectedEnsemble {
  std::vector<Entry> entries;
  hilbert::Bipartition bipartition;
  double dropped_weight = 0.0;

  std::size_t dim_a() const { return bipartition.a_space().dim(); }
};

/// Measure B in the computational basis. Entries follow the admissible z_B
/// order; non-admissible weight and branches below p_floor are discarded and
/// the rest renormalized.
ProjectedEnsemble project(const evolve::StateVector& psi, const hilbert::Bipartition& bp,
                          double p_floor = kDefaultPFloor);

/// Reduced density matrix on the A space of the postselected, renormalized state.
CMatrix reduced_density_matrix(const evolve::StateVector& psi, const hilbert::Bipartition& bp);

enum class MomentBasis { Product, Symmetric };

/// k-th moment. In the product basis the matrix is d^k x d^k with replica
/// index i_1 + d i_2 + ...; in the symmetric basis it is expressed in
/// SymmetricBasis(d, k) coordinates, which carries the same spectrum because
/// every moment used here is supported on Sym^k.
struct MomentMatrix {
  int k = 1;
  int d = 1;
  MomentBasis basis = MomentBasis::Product;
  CMatrix matrix;
};

MomentMatrix moment(const ProjectedEnsemble& ens, int k, MomentBasis basis = MomentBasis::Symmetric);

/// Haar moment. Product basis: sum over replica permutations divided by
/// d (d+1) ... (d+k-1). Symmetric basis: identity / binom(d+k-1, k).
MomentMatrix haar_moment(int d, int k, MomentBasis basis = MomentBasis::Symmetric);

/// Replica permutation operator P_sigma on (C^d)^{(x)k}.
CMatrix permutation_operator(int d, const std::vector<int>& sigma);

enum class Flavor { Complex, Real };
std::string to_string(Flavor f);
Flavor flavor_from_string(const std::string& text);

/// Empirical k-th moment of normalized Gaussian vectors. Sample i draws from
/// the stream "reference:<i>" (real part, then imaginary part per component).
MomentMatrix sampled_reference_moment(int d, int k, Flavor flavor, std::size_t samples, std::uint64_t seed,
                                      MomentBasis basis = MomentBasis::Symmetric);

double trace_distance(const MomentMatrix& a, const MomentMatrix& b);
double trace_distance(const CMatrix& a, const CMatrix& b);

enum class ReferenceKind { Haar, SampledReal, SampledComplex };
std::string to_string(ReferenceKind r);
ReferenceKind reference_from_string(const std::string& text);

struct ReferenceSpec {
  ReferenceKind kind = ReferenceKind::Haar;
  std::size_t samples = 200;
  std::uint64_t seed = 0;

  bool operator==(const ReferenceSpec&) const = default;
};

/// Reference moments for k = 1..k_max on a d-dimensional A space.
class ReferenceSet {
 public:
  ReferenceSet(int d, int k_max, const ReferenceSpec& spec);
  const MomentMatrix& at(int k) const { return moments_.at(static_cast<std::size_t>(k - 1)); }
  int d() const { return d_; }
  int k_max() const { return static_cast<int>(moments_.size()); }
  const ReferenceSpec& spec() const { return spec_; }

 private:
  int d_;
  ReferenceSpec spec_;
  std::vector<MomentMatrix> moments_;
};

double delta_k(const ProjectedEnsemble& ens, int k, const MomentMatrix& reference);
double delta_k(const ProjectedEnsemble& ens, int k, const ReferenceSpec& reference = {});

/// Delta^(1..k_max) in one pass.
std::vector<double> delta_all(const ProjectedEnsemble& ens, const ReferenceSet& refs);

struct BlochPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double p = 0.0;
  Bits zb = 0;
};

/// Bloch vector of every entry (A space of dimension 2, ordered |0>, |1>).
/// The global phase is fixed so the first nonzero amplitude is real positive.
std::vector<BlochPoint> bloch_coordinates(const ProjectedEnsemble& ens);

/// (-1)^{#down in z_B}.
int alpha_zb(const ProjectedEnsemble& ens, Bits zb);

/// Per entry || K_A Z_A psi_A - (alpha / alpha_zB) psi_A ||, K_A = complex conjugation.
std::vector<double> symmetry_residuals(const ProjectedEnsemble& ens, const models::OperatorMatrix& z_a, int alpha);

}  // namespace deepthermal::ensemble
