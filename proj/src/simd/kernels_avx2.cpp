// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include "deepthermal/simd/kernels.hpp"

#if defined(DEEPTHERMAL_HAVE_AVX2)
#include <immintrin.h>

namespace deepthermal::simd {

namespace {

inline double* re(cplx* p) { return reinterpret_cast<double*>(p); }
inline const double* re(const cplx* p) { return reinterpret_cast<const double*>(p); }

// Two complex products packed as [r0, i0, r1, i1].
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d a_re = _mm256_movedup_pd(a);
  const __m256d a_im = _mm256_permute_pd(a, 0xF);
  const __m256d b_sw = _mm256_permute_pd(b, 0x5);
  return _mm256_fmaddsub_pd(a_re, b, _mm256_mul_pd(a_im, b_sw));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d are = _mm256_set1_pd(a.real());
  const __m256d aim = _mm256_set1_pd(a.imag());
  const double* xs = re(x);
  double* ys = re(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xs + 2 * i);
    const __m256d yv = _mm256_loadu_pd(ys + 2 * i);
    const __m256d prod = _mm256_fmaddsub_pd(are, xv, _mm256_mul_pd(aim, _mm256_permute_pd(xv, 0x5)));
    _mm256_storeu_pd(ys + 2 * i, _mm256_add_pd(yv, prod));
  }
  for (; i < n; ++i) {
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    ys[2 * i] += a.real() * xr - a.imag() * xi;
    ys[2 * i + 1] += a.real() * xi + a.imag() * xr;
  }
}

void raxpy(std::size_t n, cplx a, const double* x, cplx* y) {
  const __m256d av = _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
  double* ys = re(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xd = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(x + i)), 0x50);
    _mm256_storeu_pd(ys + 2 * i, _mm256_fmadd_pd(xd, av, _mm256_loadu_pd(ys + 2 * i)));
  }
  for (; i < n; ++i) {
    ys[2 * i] += a.real() * x[i];
    ys[2 * i + 1] += a.imag() * x[i];
  }
}

void her_rank1(std::size_t n, double w, const cplx* v, cplx* m) {
  for (std::size_t j = 0; j < n; ++j) caxpy(n, w * std::conj(v[j]), v, m + j * n);
}

void flip_apply(std::size_t n, std::uint64_t mask, const cplx* w, const cplx* x, cplx* y) {
  const double* ws = re(w);
  const double* xs = re(x);
  double* ys = re(y);
  if (n < 2) {
    y[mask] += w[0] * x[0];
    return;
  }
  const std::size_t pair_mask = static_cast<std::size_t>(mask) & ~std::size_t{1};
  if ((mask & 1u) == 0) {
    for (std::size_t i = 0; i < n; i += 2) {
      const std::size_t j = i ^ pair_mask;
      const __m256d prod = cmul(_mm256_loadu_pd(ws + 2 * i), _mm256_loadu_pd(xs + 2 * i));
      _mm256_storeu_pd(ys + 2 * j, _mm256_add_pd(_mm256_loadu_pd(ys + 2 * j), prod));
    }
  } else {
    // i, i+1 land on j+1, j: swap the two complex lanes.
    for (std::size_t i = 0; i < n; i += 2) {
      const std::size_t j = i ^ pair_mask;
      __m256d prod = cmul(_mm256_loadu_pd(ws + 2 * i), _mm256_loadu_pd(xs + 2 * i));
      prod = _mm256_permute2f128_pd(prod, prod, 0x01);
      _mm256_storeu_pd(ys + 2 * j, _mm256_add_pd(_mm256_loadu_pd(ys + 2 * j), prod));
    }
  }
}

double norm2(std::size_t n, const cplx* x) {
  const double* xs = re(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(xs + 2 * i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += xs[2 * i] * xs[2 * i] + xs[2 * i + 1] * xs[2 * i + 1];
  return s;
}

cplx dot(std::size_t n, const cplx* x, const cplx* y) {
  const double* xs = re(x);
  const double* ys = re(y);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xs + 2 * i);
    const __m256d yv = _mm256_loadu_pd(ys + 2 * i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), acc_im);
  }
  // acc_im lanes hold [xr*yi, xi*yr, ...]
  alignas(32) double im[4];
  _mm256_store_pd(im, acc_im);
  double sr = hsum(acc_re);
  double si = (im[0] - im[1]) + (im[2] - im[3]);
  for (; i < n; ++i) {
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    const double yr = ys[2 * i], yi = ys[2 * i + 1];
    sr += xr * yr + xi * yi;
    si += xr * yi - xi * yr;
  }
  return {sr, si};
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Isa::Avx2, "avx2", caxpy, raxpy, her_rank1, flip_apply, norm2, dot};
  return &table;
}

}  // namespace deepthermal::simd

#else

namespace deepthermal::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace deepthermal::simd

#endif
