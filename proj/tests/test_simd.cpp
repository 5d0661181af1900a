#include <doctest.h>

#include <random>

#include "deepthermal/simd/kernels.hpp"
#include "deepthermal/types.hpp"

using namespace deepthermal;

namespace {

CVector random_vec(std::size_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  CVector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = cplx(nd(gen), nd(gen));
  return v;
}

double max_diff(const CVector& a, const CVector& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("scalar kernels agree with direct Eigen expressions") {
  const auto& k = simd::scalar_kernels();
  std::mt19937_64 gen(3);
  const std::size_t n = 37;
  const CVector x = random_vec(n, gen), y0 = random_vec(n, gen);
  const cplx a(0.3, -1.2);
  CVector y = y0;
  k.caxpy(n, a, x.data(), y.data());
  CHECK(max_diff(y, y0 + a * x) < 1e-14);
  const Eigen::VectorXd r = x.real();
  y = y0;
  k.raxpy(n, a, r.data(), y.data());
  CHECK(max_diff(y, y0 + a * r.cast<cplx>()) < 1e-14);
  CHECK(std::abs(k.norm2(n, x.data()) - x.squaredNorm()) < 1e-12);
  CHECK(std::abs(k.dot(n, x.data(), y0.data()) - x.dot(y0)) < 1e-12);
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  k.her_rank1(n, 0.7, x.data(), m.data());
  CHECK((m - 0.7 * x * x.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
  const std::size_t p = 64;
  const CVector w = random_vec(p, gen), xin = random_vec(p, gen);
  for (std::uint64_t mask : {0ULL, 1ULL, 6ULL, 13ULL, 63ULL}) {
    CVector out = CVector::Zero(static_cast<Eigen::Index>(p));
    k.flip_apply(p, mask, w.data(), xin.data(), out.data());
    CVector ref = CVector::Zero(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) ref[static_cast<Eigen::Index>(i ^ mask)] += w[static_cast<Eigen::Index>(i)] * xin[static_cast<Eigen::Index>(i)];
    CHECK(max_diff(out, ref) < 1e-14);
  }
}

TEST_CASE("avx2 kernels match the scalar reference") {
  if (!simd::cpu_supports(simd::Isa::Avx2)) {
    MESSAGE("AVX2 not available on this machine; equivalence test skipped");
    return;
  }
  const auto& s = simd::scalar_kernels();
  const auto& v = *simd::avx2_kernels();
  CHECK(v.isa == simd::Isa::Avx2);
  std::mt19937_64 gen(11);
  for (std::size_t n : {1u, 2u, 3u, 7u, 8u, 31u, 64u, 257u}) {
    const CVector x = random_vec(n, gen), y0 = random_vec(n, gen);
    const cplx a(-0.4, 0.9);
    CVector ys = y0, yv = y0;
    s.caxpy(n, a, x.data(), ys.data());
    v.caxpy(n, a, x.data(), yv.data());
    CHECK(max_diff(ys, yv) < 1e-14);
    const Eigen::VectorXd r = x.imag();
    ys = y0;
    yv = y0;
    s.raxpy(n, a, r.data(), ys.data());
    v.raxpy(n, a, r.data(), yv.data());
    CHECK(max_diff(ys, yv) < 1e-14);
    CHECK(std::abs(s.norm2(n, x.data()) - v.norm2(n, x.data())) < 1e-12 * (1 + s.norm2(n, x.data())));
    CHECK(std::abs(s.dot(n, x.data(), y0.data()) - v.dot(n, x.data(), y0.data())) < 1e-12 * (1 + x.norm() * y0.norm()));
    CMatrix ms = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), mv = ms;
    s.her_rank1(n, 0.25, x.data(), ms.data());
    v.her_rank1(n, 0.25, x.data(), mv.data());
    CHECK((ms - mv).cwiseAbs().maxCoeff() < 1e-13);
  }
  for (std::size_t p : {1u, 2u, 4u, 16u, 1024u}) {
    const CVector w = random_vec(p, gen), xin = random_vec(p, gen);
    for (std::uint64_t mask = 0; mask < std::min<std::size_t>(p, 16); ++mask) {
      CVector os = CVector::Zero(static_cast<Eigen::Index>(p)), ov = os;
      s.flip_apply(p, mask, w.data(), xin.data(), os.data());
      v.flip_apply(p, mask, w.data(), xin.data(), ov.data());
      CHECK(max_diff(os, ov) < 1e-14);
    }
  }
}

TEST_CASE("kernel table selection") {
  const auto& before = simd::active();
  simd::select(simd::Isa::Scalar);
  CHECK(simd::active().isa == simd::Isa::Scalar);
  CHECK(simd::isa_name(simd::Isa::Scalar) == "scalar");
  if (simd::cpu_supports(simd::Isa::Avx2)) {
    simd::select(simd::Isa::Avx2);
    CHECK(simd::active().isa == simd::Isa::Avx2);
  }
  simd::select(before.isa);
}
