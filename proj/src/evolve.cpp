#include "deepthermal/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "deepthermal/error.hpp"
#include "deepthermal/rng.hpp"
#include "deepthermal/simd/kernels.hpp"

namespace deepthermal::evolve {

using hilbert::BasisSpace;

namespace {

// Re-orthonormalize eigenvectors inside clusters of (numerically) equal
// eigenvalues, in ascending column order.
template <class Mat>
void orthonormalize_degenerate(const RVector& e, Mat& v, double tol) {
  const Eigen::Index n = e.size();
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && e[end] - e[end - 1] < tol) ++end;
    for (Eigen::Index c = start + 1; c < end && end - start > 1; ++c) {
      for (Eigen::Index p = start; p < c; ++p) {
        const auto proj = v.col(p).dot(v.col(c));
        v.col(c) -= proj * v.col(p);
      }
      v.col(c).normalize();
    }
    if (end - start > 1) v.col(start).normalize();
    start = end;
  }
}

EigenBlock diagonalize_dense(const models::OperatorMatrix& h) {
  const auto n = static_cast<lapack_int>(h.matrix.rows());
  if (h.matrix.rows() != h.matrix.cols()) throw ValidationError("diagonalize: matrix is not square");
  const double scale = std::max(1.0, h.matrix.cwiseAbs().maxCoeff());
  if (h.hermiticity_residual() > 1e-10 * scale) throw NumericError("diagonalize: operator is not Hermitian");
  const double degen_tol = 1e-10 * scale;

  EigenBlock block;
  block.energies.resize(n);
  if (n == 0) return block;
  if (h.max_imag() <= 1e-14 * scale) {
    block.real = true;
    block.real_vectors = h.matrix.real();
    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, block.real_vectors.data(), n, block.energies.data());
    if (info != 0) throw NumericError("diagonalize: dsyevd failed, info=" + std::to_string(info));
    orthonormalize_degenerate(block.energies, block.real_vectors, degen_tol);
  } else {
    block.complex_vectors = h.matrix;
    const lapack_int info =
        LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, block.complex_vectors.data(), n, block.energies.data());
    if (info != 0) throw NumericError("diagonalize: zheevd failed, info=" + std::to_string(info));
    orthonormalize_degenerate(block.energies, block.complex_vectors, degen_tol);
  }
  return block;
}

double block_norm(const EigenBlock& b) {
  return b.size() ? std::max(std::abs(b.energies[0]), std::abs(b.energies[b.energies.size() - 1])) : 0.0;
}

}  // namespace

std::size_t EigenSystem::count() const {
  std::size_t c = 0;
  for (const auto& b : blocks) c += b.size();
  return c;
}

std::vector<EigenSystem::Ref> EigenSystem::ordered() const {
  std::vector<Ref> refs;
  refs.reserve(count());
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (std::size_t c = 0; c < blocks[b].size(); ++c)
      refs.push_back({b, c, blocks[b].energies[static_cast<Eigen::Index>(c)]});
  std::stable_sort(refs.begin(), refs.end(), [](const Ref& l, const Ref& r) { return l.energy < r.energy; });
  return refs;
}

RVector EigenSystem::eigenvalues() const {
  const auto refs = ordered();
  RVector e(static_cast<Eigen::Index>(refs.size()));
  for (std::size_t i = 0; i < refs.size(); ++i) e[static_cast<Eigen::Index>(i)] = refs[i].energy;
  return e;
}

CVector EigenSystem::vector(const Ref& ref) const {
  const auto& b = blocks.at(ref.block);
  const auto c = static_cast<Eigen::Index>(ref.column);
  CVector local = b.real ? CVector(b.real_vectors.col(c).cast<cplx>()) : CVector(b.complex_vectors.col(c));
  if (b.embed.empty()) return local;
  CVector out = CVector::Zero(static_cast<Eigen::Index>(space.dim()));
  for (std::size_t i = 0; i < b.embed.size(); ++i) out[b.embed[i]] = local[static_cast<Eigen::Index>(i)];
  return out;
}

EigenSystem diagonalize(const models::OperatorMatrix& h) {
  EigenSystem sys;
  sys.space = h.space;
  sys.blocks.push_back(diagonalize_dense(h));
  sys.operator_norm_estimate = block_norm(sys.blocks.back());
  return sys;
}

EigenSystem diagonalize_blocks(const BasisSpace& parent,
                               std::vector<std::pair<models::OperatorMatrix, std::vector<std::int64_t>>> blocks) {
  EigenSystem sys;
  sys.space = parent;
  std::vector<char> covered(parent.dim(), 0);
  for (auto& [op, embed] : blocks) {
    if (embed.size() != op.dim()) throw ValidationError("diagonalize_blocks: embedding size mismatch");
    for (auto i : embed) {
      if (i < 0 || static_cast<std::size_t>(i) >= parent.dim() || covered[static_cast<std::size_t>(i)])
        throw ValidationError("diagonalize_blocks: blocks must partition the parent space");
      covered[static_cast<std::size_t>(i)] = 1;
    }
    EigenBlock b = diagonalize_dense(op);
    b.embed = std::move(embed);
    sys.operator_norm_estimate = std::max(sys.operator_norm_estimate, block_norm(b));
    op.matrix.resize(0, 0);
    sys.blocks.push_back(std::move(b));
  }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end())
    throw ValidationError("diagonalize_blocks: blocks must cover the parent space");
  return sys;
}

SpectralPropagator::SpectralPropagator(const EigenSystem& eig, const StateVector& psi0) : eig_(&eig), psi0_(psi0) {
  if (!psi0.space.same_as(eig.space) || psi0.dim() != eig.space.dim())
    throw ValidationError("evolve: state and eigensystem live on different spaces");
  for (const auto& b : eig.blocks) {
    CVector local;
    if (b.embed.empty()) {
      local = psi0.amplitudes;
    } else {
      local.resize(static_cast<Eigen::Index>(b.embed.size()));
      for (std::size_t i = 0; i < b.embed.size(); ++i) local[static_cast<Eigen::Index>(i)] = psi0.amplitudes[b.embed[i]];
    }
    overlaps_.push_back(b.real ? CVector(b.real_vectors.transpose() * local) : CVector(b.complex_vectors.adjoint() * local));
  }
}

StateVector SpectralPropagator::at(double t) const {
  StateVector out{CVector::Zero(static_cast<Eigen::Index>(psi0_.dim())), psi0_.space, psi0_.label};
  if (t == 0.0) {
    out.amplitudes = psi0_.amplitudes;
    return out;
  }
  const auto& k = simd::active();
  for (std::size_t bi = 0; bi < eig_->blocks.size(); ++bi) {
    const auto& b = eig_->blocks[bi];
    const auto& c = overlaps_[bi];
    const auto rows = b.embed.empty() ? out.amplitudes.size() : static_cast<Eigen::Index>(b.embed.size());
    CVector local = CVector::Zero(rows);
    for (Eigen::Index n = 0; n < b.energies.size(); ++n) {
      const cplx coeff = std::polar(1.0, -b.energies[n] * t) * c[n];
      if (coeff == cplx(0.0)) continue;
      if (b.real)
        k.raxpy(static_cast<std::size_t>(rows), coeff, b.real_vectors.col(n).data(), local.data());
      else
        k.caxpy(static_cast<std::size_t>(rows), coeff, b.complex_vectors.col(n).data(), local.data());
    }
    if (b.embed.empty())
      out.amplitudes += local;
    else
      for (std::size_t i = 0; i < b.embed.size(); ++i) out.amplitudes[b.embed[i]] += local[static_cast<Eigen::Index>(i)];
  }
  return out;
}

StateVector evolve_state(const EigenSystem& eig, const StateVector& psi0, double t) {
  return SpectralPropagator(eig, psi0).at(t);
}

// ---- initial states ----

std::string to_string(InitialStateSpec::Kind kind) {
  using K = InitialStateSpec::Kind;
  switch (kind) {
    case K::Basis:
      return "basis";
    case K::RandomAngles:
      return "random_angles";
    case K::Zn:
      return "zn";
    case K::Typical:
      return "typical";
    case K::AlphaSuperposition:
      return "alpha_superposition";
  }
  return "?";
}

InitialStateSpec::Kind state_kind_from_string(const std::string& text) {
  using K = InitialStateSpec::Kind;
  if (text == "basis") return K::Basis;
  if (text == "random_angles") return K::RandomAngles;
  if (text == "zn") return K::Zn;
  if (text == "typical") return K::Typical;
  if (text == "alpha_superposition") return K::AlphaSuperposition;
  throw ValidationError("unknown state kind: " + text);
}

std::string describe(const InitialStateSpec& spec, int n_sites) {
  using K = InitialStateSpec::Kind;
  std::ostringstream os;
  switch (spec.kind) {
    case K::Basis:
      os << "basis:" << hilbert::config_to_string(spec.config, n_sites);
      break;
    case K::RandomAngles:
      os << "random_angles:seed=" << spec.seed << (spec.fix_last_phi ? ":fix_last_phi" : "");
      break;
    case K::Zn:
      os << "Z" << spec.zn;
      break;
    case K::Typical:
      os << "typical_" << (spec.complex ? "complex" : "real") << ":seed=" << spec.seed << ":" << spec.stream;
      break;
    case K::AlphaSuperposition:
      os << "alpha_sup:" << hilbert::config_to_string(spec.config, n_sites) << "+"
         << hilbert::config_to_string(spec.config_b, n_sites);
      break;
  }
  return os.str();
}

Bits zn_config(int n, int n_sites) {
  if (n < 0 || n == 1) throw ValidationError("zn: n must be 0 or >= 2");
  Bits b = 0;
  if (n == 0) return b;
  for (int j = 0; j < n_sites; ++j)
    if (j % n == 0) b |= Bits{1} << j;
  return b;
}

StateVector product_state(const BasisSpace& space, const std::vector<double>& theta, const std::vector<double>& phi) {
  const int n = space.sites();
  if (static_cast<int>(theta.size()) != n || static_cast<int>(phi.size()) != n)
    throw ValidationError("product_state: need one (theta, phi) pair per site");
  std::vector<cplx> up(static_cast<std::size_t>(n)), down(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < up.size(); ++j) {
    up[j] = std::cos(theta[j] / 2.0);
    down[j] = std::polar(std::sin(theta[j] / 2.0), phi[j]);
  }
  StateVector s{CVector(static_cast<Eigen::Index>(space.dim())), space, "product"};
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const Bits c = space.config(i);
    cplx a = 1.0;
    for (int j = 0; j < n; ++j) a *= ((c >> j) & 1) ? up[static_cast<std::size_t>(j)] : down[static_cast<std::size_t>(j)];
    s.amplitudes[static_cast<Eigen::Index>(i)] = a;
  }
  const double norm = s.amplitudes.norm();
  if (norm < 1e-14) throw ValidationError("product_state: state has no weight in the space");
  s.amplitudes /= norm;
  return s;
}

StateVector build_initial_state(const BasisSpace& space, const InitialStateSpec& spec) {
  using K = InitialStateSpec::Kind;
  const int n = space.sites();
  const auto dim = static_cast<Eigen::Index>(space.dim());
  StateVector s{CVector::Zero(dim), space, describe(spec, n)};
  auto basis_index = [&](Bits c, const char* what) {
    const auto i = space.index_of(c);
    if (i < 0) throw ValidationError(std::string(what) + ": configuration " + hilbert::config_to_string(c, n) + " is not in the space");
    return i;
  };
  switch (spec.kind) {
    case K::Basis:
      s.amplitudes[basis_index(spec.config, "basis state")] = 1.0;
      break;
    case K::Zn: {
      const Bits c = zn_config(spec.zn, n);
      if (!space.contains(c)) throw ValidationError("zn: pattern Z" + std::to_string(spec.zn) + " is incompatible with the space");
      s.amplitudes[space.index_of(c)] = 1.0;
      break;
    }
    case K::RandomAngles: {
      CounterRng rng(spec.seed, "angles");
      std::vector<double> theta(static_cast<std::size_t>(n)), phi(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) {
        theta[static_cast<std::size_t>(j)] = std::numbers::pi * rng.uniform();
        phi[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * rng.uniform();
      }
      if (spec.fix_last_phi) phi.back() = std::numbers::pi / 2.0;
      s.amplitudes = product_state(space, theta, phi).amplitudes;
      break;
    }
    case K::Typical: {
      CounterRng rng(spec.seed, "typical:" + std::to_string(spec.stream));
      for (Eigen::Index i = 0; i < dim; ++i) {
        const double re = rng.normal();
        const double im = spec.complex ? rng.normal() : 0.0;
        s.amplitudes[i] = cplx(re, im);
      }
      s.amplitudes.normalize();
      break;
    }
    case K::AlphaSuperposition: {
      const auto ia = basis_index(spec.config, "alpha_superposition");
      const auto ib = basis_index(spec.config_b, "alpha_superposition");
      if (hilbert::parity_of(spec.config, n) == hilbert::parity_of(spec.config_b, n))
        throw ValidationError("alpha_superposition: configurations must have opposite Z eigenvalues");
      s.amplitudes[ia] = 1.0 / std::numbers::sqrt2;
      s.amplitudes[ib] = 1.0 / std::numbers::sqrt2;
      break;
    }
  }
  return s;
}

}  // namespace deepthermal::evolve
