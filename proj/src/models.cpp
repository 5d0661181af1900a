#include "deepthermal/models.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "deepthermal/error.hpp"
#include "deepthermal/rng.hpp"

namespace deepthermal::models {

using hilbert::BasisSpace;
using hilbert::Boundary;
using hilbert::SpaceKind;

std::string to_string(ModelName name) {
  switch (name) {
    case ModelName::Syk:
      return "syk";
    case ModelName::Ising:
      return "ising";
    case ModelName::East:
      return "east";
    case ModelName::Pxp:
      return "pxp";
  }
  return "?";
}

ModelName model_from_string(const std::string& text) {
  if (text == "syk") return ModelName::Syk;
  if (text == "ising") return ModelName::Ising;
  if (text == "east") return ModelName::East;
  if (text == "pxp") return ModelName::Pxp;
  throw ValidationError("unknown model: " + text);
}

std::string to_string(Perturbation p) {
  switch (p) {
    case Perturbation::None:
      return "none";
    case Perturbation::Pxpz:
      return "pxpz";
    case Perturbation::Pxpxp:
      return "pxpxp";
  }
  return "?";
}

Perturbation perturbation_from_string(const std::string& text) {
  if (text == "none") return Perturbation::None;
  if (text == "pxpz") return Perturbation::Pxpz;
  if (text == "pxpxp") return Perturbation::Pxpxp;
  throw ValidationError("unknown perturbation: " + text);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

// P_{i-1} X_i P_{i+1}; neighbours outside an open chain are dropped (identity).
PauliSum pxp_local(int n, int i, Boundary bc) {
  PauliSum term = PauliSum::x(n, i);
  const bool periodic = bc == Boundary::Periodic;
  if (i - 1 >= 0 || periodic) term = PauliSum::down_projector(n, wrap(i - 1, n)) * term;
  if (i + 1 < n || periodic) term = term * PauliSum::down_projector(n, wrap(i + 1, n));
  return term;
}

PauliSum syk_terms(const ModelSpec& spec) {
  const int n = spec.n;
  const int m = 2 * n;
  std::vector<PauliSum> chi;
  chi.reserve(static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i) chi.push_back(majorana(n, i));
  CounterRng rng(spec.seed, "syk");
  const double sigma = std::sqrt(6.0 / std::pow(2.0 * n, 3));
  PauliSum h(n);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      const PauliSum ab = chi[a] * chi[b];
      for (int c = b + 1; c < m; ++c) {
        const PauliSum abc = ab * chi[c];
        for (int d = c + 1; d < m; ++d) {
          const double j = sigma * rng.normal();
          h += j * (abc * chi[d]);
        }
      }
    }
  return h.simplify();
}

}  // namespace

std::map<std::string, std::string> ModelSpec::parameters() const {
  std::map<std::string, std::string> p;
  p["N"] = std::to_string(n);
  p["bc"] = hilbert::to_string(bc);
  switch (name) {
    case ModelName::Syk:
      p["seed"] = std::to_string(seed);
      break;
    case ModelName::Ising:
      p["h"] = fmt(h);
      p["g"] = fmt(g);
      break;
    case ModelName::East:
      break;
    case ModelName::Pxp:
      p["mu"] = fmt(mu);
      p["perturbation"] = to_string(perturbation);
      if (perturbation == Perturbation::Pxpz) {
        p["pxpz_h"] = fmt(pxpz_h);
        if (bc == Boundary::Open) p["pxpz_obc"] = "out-of-range sigma^z factors dropped";
      }
      if (perturbation == Perturbation::Pxpxp) p["pxpxp_lambda"] = fmt(pxpxp_lambda);
      break;
  }
  return p;
}

PauliSum majorana(int n, int index) {
  if (index < 1 || index > 2 * n) throw ValidationError("majorana: index out of range");
  const int site = (index - 1) / 2;
  Bits zstring = 0;
  for (int j = 0; j < site; ++j) zstring |= Bits{1} << j;
  PauliSum string = PauliSum(n).add(1.0 / std::numbers::sqrt2, 0, zstring);
  return string * ((index % 2 == 1) ? PauliSum::y(n, site) : PauliSum::x(n, site));
}

PauliSum hamiltonian_terms(const ModelSpec& spec) {
  const int n = spec.n;
  if (n < 2 || n > kMaxSites) throw ValidationError("model: N out of range");
  const bool periodic = spec.bc == Boundary::Periodic;
  PauliSum h(n);
  switch (spec.name) {
    case ModelName::Syk:
      return syk_terms(spec);
    case ModelName::Ising:
      for (int i = 0; i + 1 < n; ++i) h += PauliSum::z(n, i) * PauliSum::z(n, i + 1);
      if (periodic && n > 2) h += PauliSum::z(n, n - 1) * PauliSum::z(n, 0);
      for (int i = 0; i < n; ++i) {
        h += spec.h * PauliSum::z(n, i);
        h += spec.g * PauliSum::x(n, i);
      }
      break;
    case ModelName::East:
      h += periodic ? PauliSum::down_projector(n, n - 1) * PauliSum::x(n, 0) : PauliSum::x(n, 0);
      for (int i = 1; i < n; ++i) h += PauliSum::down_projector(n, i - 1) * PauliSum::x(n, i);
      break;
    case ModelName::Pxp: {
      for (int i = 0; i < n; ++i) h += pxp_local(n, i, spec.bc);
      if (spec.mu != 0.0)
        for (int i = 0; i < n; ++i) h += spec.mu * PauliSum::number(n, i);
      if (spec.perturbation == Perturbation::Pxpz) {
        PauliSum hint(n);
        for (int i = 0; i < n; ++i) {
          const PauliSum local = pxp_local(n, i, spec.bc);
          for (int off : {-2, 2}) {
            const int j = i + off;
            if (!periodic && (j < 0 || j >= n)) continue;
            hint += local * PauliSum::z(n, wrap(j, n));
          }
        }
        h += -spec.pxpz_h * hint;
      } else if (spec.perturbation == Perturbation::Pxpxp) {
        if (n < 5) throw ValidationError("pxpxp perturbation needs N >= 5");
        PauliSum therm(n);
        for (int j = 0; j < n; ++j) {
          if (!periodic && (j - 2 < 0 || j + 2 >= n)) continue;
          therm += PauliSum::down_projector(n, wrap(j - 2, n)) * PauliSum::x(n, wrap(j - 1, n)) *
                   PauliSum::down_projector(n, j) * PauliSum::x(n, wrap(j + 1, n)) *
                   PauliSum::down_projector(n, wrap(j + 2, n));
        }
        h += spec.pxpxp_lambda * therm;
      }
      break;
    }
  }
  return h.simplify(1e-15);
}

OperatorMatrix build_hamiltonian(const ModelSpec& spec, const BasisSpace& space) {
  if (space.sites() != spec.n) throw ValidationError("build_hamiltonian: space has a different N than the model");
  if (space.boundary() != spec.bc) throw ValidationError("build_hamiltonian: space and model boundaries differ");
  if (spec.name == ModelName::Pxp && space.kind() != SpaceKind::Blockaded)
    throw ValidationError("build_hamiltonian: pxp requires a blockaded space");
  if (spec.name != ModelName::Pxp && space.kind() != SpaceKind::Full)
    throw ValidationError("build_hamiltonian: " + to_string(spec.name) + " requires a full (or parity-sector) space");
  OperatorMatrix op;
  op.matrix = to_dense(hamiltonian_terms(spec), space);
  op.space = space;
  op.name = "H_" + to_string(spec.name);
  op.meta = spec.parameters();
  return op;
}

std::uint64_t OperatorMatrix::hash() const {
  std::uint64_t h = fnv1a64(matrix.data(), static_cast<std::size_t>(matrix.size()) * sizeof(cplx));
  const std::uint64_t sh = space.hash();
  return fnv1a64(&sh, sizeof(sh), h);
}

double OperatorMatrix::hermiticity_residual() const { return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff(); }

double OperatorMatrix::unitarity_residual() const {
  const CMatrix prod = matrix.adjoint() * matrix;
  return (prod - CMatrix::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff();
}

double OperatorMatrix::max_imag() const { return matrix.imag().cwiseAbs().maxCoeff(); }

std::string to_string(BasisChange kind) {
  switch (kind) {
    case BasisChange::Identity:
      return "identity";
    case BasisChange::S:
      return "S";
    case BasisChange::P:
      return "P";
    case BasisChange::XY:
      return "XY";
    case BasisChange::Phi:
      return "phi";
  }
  return "?";
}

BasisChange basis_change_from_string(const std::string& text) {
  if (text == "identity" || text == "none" || text == "1") return BasisChange::Identity;
  if (text == "S") return BasisChange::S;
  if (text == "P") return BasisChange::P;
  if (text == "XY") return BasisChange::XY;
  if (text == "phi") return BasisChange::Phi;
  throw ValidationError("unknown basis change: " + text);
}

namespace {

// Diagonal entry of a diagonal basis change at configuration s.
cplx diagonal_phase(BasisChange kind, double phi, Bits s, int n) {
  switch (kind) {
    case BasisChange::Identity:
      return 1.0;
    case BasisChange::S: {
      const int ups = __builtin_popcountll(s);
      const int sum_z = 2 * ups - n;
      return std::polar(1.0, -std::numbers::pi / 8.0 * sum_z);
    }
    case BasisChange::P:
      return std::polar(1.0, -std::numbers::pi / 8.0 * hilbert::parity_of(s, n));
    case BasisChange::Phi:
      return std::polar(1.0, phi * hilbert::parity_of(s, n));
    case BasisChange::XY:
      break;
  }
  throw ValidationError("basis change is not diagonal");
}

// exp(i pi/4 sigma^y) exp(i pi/4 sigma^z) in the (|0>, |1>) ordering.
std::array<std::array<cplx, 2>, 2> xy_site_unitary() {
  const double c = 1.0 / std::numbers::sqrt2;
  const cplx em = std::polar(1.0, -std::numbers::pi / 4.0);
  const cplx ep = std::polar(1.0, std::numbers::pi / 4.0);
  return {{{c * em, c * ep}, {-c * em, c * ep}}};
}

void require_full(const BasisSpace& space, BasisChange kind) {
  if (space.kind() != SpaceKind::Full) throw ValidationError("basis changes are only defined on full spaces");
  if (kind == BasisChange::XY && space.sector())
    throw ValidationError("V_XY does not preserve parity sectors; use the unrestricted space");
}

}  // namespace

OperatorMatrix build_basis_change(BasisChange kind, double phi, const BasisSpace& space) {
  require_full(space, kind);
  const auto dim = static_cast<Eigen::Index>(space.dim());
  const int n = space.sites();
  OperatorMatrix op;
  op.space = space;
  op.name = "V_" + to_string(kind);
  op.meta["kind"] = to_string(kind);
  if (kind == BasisChange::Phi) op.meta["phi"] = fmt(phi);
  if (kind == BasisChange::XY) {
    const auto u = xy_site_unitary();
    op.matrix.resize(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index c = 0; c < dim; ++c) {
        cplx v = 1.0;
        for (int j = 0; j < n; ++j) v *= u[(static_cast<Bits>(r) >> j) & 1][(static_cast<Bits>(c) >> j) & 1];
        op.matrix(r, c) = v;
      }
    return op;
  }
  op.matrix = CMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    op.matrix(i, i) = diagonal_phase(kind, phi, space.config(static_cast<std::size_t>(i)), n);
  return op;
}

CVector apply_basis_change(BasisChange kind, double phi, const BasisSpace& space, const CVector& psi) {
  require_full(space, kind);
  if (static_cast<std::size_t>(psi.size()) != space.dim()) throw ValidationError("apply_basis_change: size mismatch");
  const int n = space.sites();
  CVector out = psi;
  if (kind != BasisChange::XY) {
    for (Eigen::Index i = 0; i < out.size(); ++i)
      out[i] *= diagonal_phase(kind, phi, space.config(static_cast<std::size_t>(i)), n);
    return out;
  }
  const auto u = xy_site_unitary();
  for (int j = 0; j < n; ++j) {
    const Eigen::Index bit = Eigen::Index{1} << j;
    for (Eigen::Index s = 0; s < out.size(); ++s) {
      if (s & bit) continue;
      const cplx a0 = out[s], a1 = out[s | bit];
      out[s] = u[0][0] * a0 + u[0][1] * a1;
      out[s | bit] = u[1][0] * a0 + u[1][1] * a1;
    }
  }
  return out;
}

std::vector<Pauli> pauli_pattern(const std::string& text) {
  std::vector<Pauli> p;
  for (char c : text) {
    switch (c) {
      case 'I':
        p.push_back(Pauli::I);
        break;
      case 'X':
        p.push_back(Pauli::X);
        break;
      case 'Y':
        p.push_back(Pauli::Y);
        break;
      case 'Z':
        p.push_back(Pauli::Z);
        break;
      default:
        throw ValidationError(std::string("unknown Pauli tag: ") + c);
    }
  }
  return p;
}

OperatorMatrix build_string_operator(std::span<const Pauli> pattern, const BasisSpace& space) {
  const int n = space.sites();
  if (static_cast<int>(pattern.size()) != n) throw ValidationError("string operator: pattern length must equal N");
  PauliSum s = PauliSum::identity(n);
  std::string label;
  for (int j = 0; j < n; ++j) {
    switch (pattern[static_cast<std::size_t>(j)]) {
      case Pauli::I:
        label += 'I';
        break;
      case Pauli::X:
        s = s * PauliSum::x(n, j);
        label += 'X';
        break;
      case Pauli::Y:
        s = s * PauliSum::y(n, j);
        label += 'Y';
        break;
      case Pauli::Z:
        s = s * PauliSum::z(n, j);
        label += 'Z';
        break;
    }
  }
  if (!s.diagonal() && !space.identity_indexed())
    throw ValidationError("string operator: off-diagonal strings need an unconstrained full space");
  OperatorMatrix op;
  op.matrix = to_dense(s, space);
  op.space = space;
  op.name = "string_" + label;
  op.meta["pattern"] = label;
  return op;
}

AlgebraCheck check_algebra(const OperatorMatrix& h, const OperatorMatrix& o) {
  if (h.matrix.rows() != o.matrix.rows() || h.matrix.cols() != o.matrix.cols())
    throw ValidationError("check_algebra: dimension mismatch");
  if (!h.space.same_as(o.space)) throw ValidationError("check_algebra: operators live on different spaces");
  AlgebraCheck r;
  const CMatrix& hm = h.matrix;
  const CMatrix& om = o.matrix;
  bool diag = true;
  for (Eigen::Index c = 0; c < om.cols() && diag; ++c)
    for (Eigen::Index rr = 0; rr < om.rows(); ++rr)
      if (rr != c && om(rr, c) != cplx(0.0)) {
        diag = false;
        break;
      }
  if (diag) {
    const auto dim = hm.rows();
    for (Eigen::Index c = 0; c < dim; ++c)
      for (Eigen::Index rr = 0; rr < dim; ++rr) {
        const cplx hv = hm(rr, c);
        r.commutator_residual = std::max(r.commutator_residual, std::abs(hv * (om(c, c) - om(rr, rr))));
        r.anticommutator_residual = std::max(r.anticommutator_residual, std::abs(hv * (om(c, c) + om(rr, rr))));
      }
  } else {
    const CMatrix ho = hm * om;
    const CMatrix oh = om * hm;
    r.commutator_residual = (ho - oh).cwiseAbs().maxCoeff();
    r.anticommutator_residual = (ho + oh).cwiseAbs().maxCoeff();
  }
  r.commutes = r.commutator_residual < kAlgebraTolerance;
  r.anticommutes = r.anticommutator_residual < kAlgebraTolerance;
  return r;
}

}  // namespace deepthermal::models
