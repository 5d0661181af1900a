#include "deepthermal/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deepthermal/error.hpp"
#include "deepthermal/rng.hpp"
#include "deepthermal/simd/kernels.hpp"

namespace deepthermal::ensemble {

namespace {

double product_size(int d, int k) { return std::pow(static_cast<double>(d), k); }

void check_budget(int d, int k) {
  if (product_size(d, k) > kProductBudget)
    throw ValidationError("moment: d^k = " + std::to_string(product_size(d, k)) + " exceeds the budget of 2^16");
}

// psi^{(x)k} in the product basis, replica 1 fastest.
CVector tensor_power(const CVector& psi, int k) {
  CVector out = psi;
  for (int r = 1; r < k; ++r) {
    CVector next(out.size() * psi.size());
    for (Eigen::Index j = 0; j < psi.size(); ++j) next.segment(j * out.size(), out.size()) = psi[j] * out;
    out = std::move(next);
  }
  return out;
}

// Accumulates weighted rank-one terms in either basis.
class MomentAccumulator {
 public:
  MomentAccumulator(int d, int k, MomentBasis basis) : d_(d), k_(k), basis_(basis) {
    if (k < 1) throw ValidationError("moment: k must be >= 1");
    check_budget(d, k);
    if (basis == MomentBasis::Product) {
      dim_ = static_cast<Eigen::Index>(product_size(d, k));
    } else {
      sym_.emplace(d, k);
      dim_ = static_cast<Eigen::Index>(sym_->dim());
    }
    m_ = CMatrix::Zero(dim_, dim_);
    w_.resize(dim_);
  }

  void add(double weight, const CVector& psi) {
    if (basis_ == MomentBasis::Product)
      w_ = tensor_power(psi, k_);
    else
      sym_->embed_power(psi.data(), w_.data());
    simd::active().her_rank1(static_cast<std::size_t>(dim_), weight, w_.data(), m_.data());
  }

  MomentMatrix finish() { return {k_, d_, basis_, std::move(m_)}; }

 private:
  int d_, k_;
  MomentBasis basis_;
  std::optional<SymmetricBasis> sym_;
  Eigen::Index dim_ = 0;
  CMatrix m_;
  CVector w_;
};

}  // namespace

ProjectedEnsemble project(const evolve::StateVector& psi, const hilbert::Bipartition& bp, double p_floor) {
  if (!psi.space.same_as(bp.parent()) || psi.dim() != bp.parent().dim())
    throw ValidationError("project: state does not live on the bipartition's parent space");
  ProjectedEnsemble ens{{}, bp, 0.0};
  const auto& zbs = bp.admissible_zb();
  const auto d = static_cast<Eigen::Index>(bp.a_space().dim());
  const double total = psi.amplitudes.squaredNorm();
  double kept = 0.0, admissible = 0.0;
  for (std::size_t b = 0; b < zbs.size(); ++b) {
    const auto row = bp.row(b);
    CVector v(d);
    for (Eigen::Index a = 0; a < d; ++a) {
      const auto idx = row[static_cast<std::size_t>(a)];
      v[a] = idx >= 0 ? psi.amplitudes[idx] : cplx(0.0);
    }
    const double p = v.squaredNorm();
    admissible += p;
    if (p < p_floor || p == 0.0) continue;
    kept += p;
    ens.entries.push_back({zbs[b], p, v / std::sqrt(p)});
  }
  if (admissible < 1e-10 * total || kept <= 0.0)
    throw ValidationError("project: state has no weight on the admissible z_B strings");
  for (auto& e : ens.entries) e.p /= kept;
  ens.dropped_weight = std::max(0.0, (total - kept) / total);
  return ens;
}

CMatrix reduced_density_matrix(const evolve::StateVector& psi, const hilbert::Bipartition& bp) {
  const auto d = static_cast<Eigen::Index>(bp.a_space().dim());
  CMatrix rho = CMatrix::Zero(d, d);
  double w = 0.0;
  for (std::size_t b = 0; b < bp.admissible_zb().size(); ++b) {
    const auto row = bp.row(b);
    CVector v(d);
    for (Eigen::Index a = 0; a < d; ++a) {
      const auto idx = row[static_cast<std::size_t>(a)];
      v[a] = idx >= 0 ? psi.amplitudes[idx] : cplx(0.0);
    }
    rho += v * v.adjoint();
    w += v.squaredNorm();
  }
  if (w <= 0.0) throw ValidationError("reduced_density_matrix: no admissible weight");
  return rho / w;
}

MomentMatrix moment(const ProjectedEnsemble& ens, int k, MomentBasis basis) {
  MomentAccumulator acc(static_cast<int>(ens.dim_a()), k, basis);
  for (const auto& e : ens.entries) acc.add(e.p, e.psi);
  return acc.finish();
}

CMatrix permutation_operator(int d, const std::vector<int>& sigma) {
  const int k = static_cast<int>(sigma.size());
  check_budget(d, k);
  const auto n = static_cast<Eigen::Index>(product_size(d, k));
  std::vector<Eigen::Index> stride(static_cast<std::size_t>(k), 1);
  for (int j = 1; j < k; ++j) stride[static_cast<std::size_t>(j)] = stride[static_cast<std::size_t>(j) - 1] * d;
  CMatrix p = CMatrix::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index rem = col, row = 0;
    // Replica j of the input lands in replica sigma[j] of the output.
    for (int j = 0; j < k; ++j) {
      row += (rem % d) * stride[static_cast<std::size_t>(sigma[static_cast<std::size_t>(j)])];
      rem /= d;
    }
    p(row, col) = 1.0;
  }
  return p;
}

MomentMatrix haar_moment(int d, int k, MomentBasis basis) {
  if (d < 1 || k < 1) throw ValidationError("haar_moment: need d >= 1 and k >= 1");
  check_budget(d, k);
  if (basis == MomentBasis::Symmetric) {
    const SymmetricBasis sym(d, k);
    const auto n = static_cast<Eigen::Index>(sym.dim());
    return {k, d, basis, CMatrix::Identity(n, n) / static_cast<double>(n)};
  }
  const auto n = static_cast<Eigen::Index>(product_size(d, k));
  CMatrix sum = CMatrix::Zero(n, n);
  std::vector<int> sigma(static_cast<std::size_t>(k));
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    sum += permutation_operator(d, sigma);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  double norm = 1.0;
  for (int j = 0; j < k; ++j) norm *= d + j;
  return {k, d, basis, sum / norm};
}

std::string to_string(Flavor f) { return f == Flavor::Complex ? "complex" : "real"; }

Flavor flavor_from_string(const std::string& text) {
  if (text == "complex") return Flavor::Complex;
  if (text == "real") return Flavor::Real;
  throw ValidationError("unknown flavor: " + text);
}

MomentMatrix sampled_reference_moment(int d, int k, Flavor flavor, std::size_t samples, std::uint64_t seed,
                                      MomentBasis basis) {
  if (samples < 1) throw ValidationError("sampled_reference_moment: need at least one sample");
  MomentAccumulator acc(d, k, basis);
  CVector v(d);
  const double w = 1.0 / static_cast<double>(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    CounterRng rng(seed, "reference:" + std::to_string(s));
    for (Eigen::Index j = 0; j < d; ++j) {
      const double re = rng.normal();
      const double im = flavor == Flavor::Complex ? rng.normal() : 0.0;
      v[j] = cplx(re, im);
    }
    v.normalize();
    acc.add(w, v);
  }
  return acc.finish();
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ValidationError("trace_distance: dimension mismatch");
  CMatrix diff = a - b;
  diff = 0.5 * (diff + diff.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(diff, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("trace_distance: eigensolver failed");
  const double t = 0.5 * es.eigenvalues().cwiseAbs().sum();
  return std::clamp(t, 0.0, 1.0);
}

double trace_distance(const MomentMatrix& a, const MomentMatrix& b) {
  if (a.k != b.k || a.d != b.d || a.basis != b.basis) throw ValidationError("trace_distance: moments are not comparable");
  return trace_distance(a.matrix, b.matrix);
}

std::string to_string(ReferenceKind r) {
  switch (r) {
    case ReferenceKind::Haar:
      return "haar";
    case ReferenceKind::SampledReal:
      return "sampled_real";
    case ReferenceKind::SampledComplex:
      return "sampled_complex";
  }
  return "?";
}

ReferenceKind reference_from_string(const std::string& text) {
  if (text == "haar") return ReferenceKind::Haar;
  if (text == "sampled_real") return ReferenceKind::SampledReal;
  if (text == "sampled_complex") return ReferenceKind::SampledComplex;
  throw ValidationError("unknown reference: " + text);
}

ReferenceSet::ReferenceSet(int d, int k_max, const ReferenceSpec& spec) : d_(d), spec_(spec) {
  if (k_max < 1 || k_max > 4) throw ValidationError("reference: k_max must be in 1..4");
  for (int k = 1; k <= k_max; ++k) {
    switch (spec.kind) {
      case ReferenceKind::Haar:
        moments_.push_back(haar_moment(d, k));
        break;
      case ReferenceKind::SampledReal:
        moments_.push_back(sampled_reference_moment(d, k, Flavor::Real, spec.samples, spec.seed));
        break;
      case ReferenceKind::SampledComplex:
        moments_.push_back(sampled_reference_moment(d, k, Flavor::Complex, spec.samples, spec.seed));
        break;
    }
  }
}

double delta_k(const ProjectedEnsemble& ens, int k, const MomentMatrix& reference) {
  if (reference.d != static_cast<int>(ens.dim_a()))
    throw ValidationError("delta_k: reference dimension differs from the A space");
  return trace_distance(moment(ens, k, reference.basis), reference);
}

double delta_k(const ProjectedEnsemble& ens, int k, const ReferenceSpec& reference) {
  const ReferenceSet refs(static_cast<int>(ens.dim_a()), k, reference);
  return delta_k(ens, k, refs.at(k));
}

std::vector<double> delta_all(const ProjectedEnsemble& ens, const ReferenceSet& refs) {
  std::vector<double> out;
  for (int k = 1; k <= refs.k_max(); ++k) out.push_back(delta_k(ens, k, refs.at(k)));
  return out;
}

std::vector<BlochPoint> bloch_coordinates(const ProjectedEnsemble& ens) {
  if (ens.dim_a() != 2) throw ValidationError("bloch_coordinates: the A space must have dimension 2");
  std::vector<BlochPoint> out;
  for (const auto& e : ens.entries) {
    cplx c0 = e.psi[0], c1 = e.psi[1];
    const cplx lead = std::abs(c0) > 0.0 ? c0 : c1;
    const cplx phase = std::abs(lead) > 0.0 ? std::conj(lead) / std::abs(lead) : cplx(1.0);
    c0 *= phase;
    c1 *= phase;
    const cplx r = std::conj(c0) * c1;
    out.push_back({2.0 * r.real(), 2.0 * r.imag(), std::norm(c1) - std::norm(c0), e.p, e.zb});
  }
  return out;
}

int alpha_zb(const ProjectedEnsemble& ens, Bits zb) { return hilbert::parity_of(zb, ens.bipartition.n_b()); }

std::vector<double> symmetry_residuals(const ProjectedEnsemble& ens, const models::OperatorMatrix& z_a, int alpha) {
  const auto d = static_cast<Eigen::Index>(ens.dim_a());
  if (z_a.matrix.rows() != d || z_a.matrix.cols() != d)
    throw ValidationError("symmetry_residuals: Z_A does not match the A space");
  CMatrix off = z_a.matrix;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > 0.0) throw ValidationError("symmetry_residuals: Z_A must be diagonal");
  const CVector diag = z_a.matrix.diagonal();
  std::vector<double> out;
  for (const auto& e : ens.entries) {
    const double ratio = static_cast<double>(alpha) / alpha_zb(ens, e.zb);
    const CVector lhs = diag.cwiseProduct(e.psi).conjugate();
    out.push_back((lhs - ratio * e.psi).norm());
  }
  return out;
}

}  // namespace deepthermal::ensemble
