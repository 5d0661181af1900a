#include "deepthermal/simd/kernels.hpp"

namespace deepthermal::simd {

namespace {

inline double* re(cplx* p) { return reinterpret_cast<double*>(p); }
inline const double* re(const cplx* p) { return reinterpret_cast<const double*>(p); }

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double ar = a.real(), ai = a.imag();
  const double* xs = re(x);
  double* ys = re(y);
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    ys[2 * i] += ar * xr - ai * xi;
    ys[2 * i + 1] += ar * xi + ai * xr;
  }
}

void raxpy(std::size_t n, cplx a, const double* x, cplx* y) {
  const double ar = a.real(), ai = a.imag();
  double* ys = re(y);
  for (std::size_t i = 0; i < n; ++i) {
    ys[2 * i] += ar * x[i];
    ys[2 * i + 1] += ai * x[i];
  }
}

void her_rank1(std::size_t n, double w, const cplx* v, cplx* m) {
  for (std::size_t j = 0; j < n; ++j) caxpy(n, w * std::conj(v[j]), v, m + j * n);
}

void flip_apply(std::size_t n, std::uint64_t mask, const cplx* w, const cplx* x, cplx* y) {
  const double* ws = re(w);
  const double* xs = re(x);
  double* ys = re(y);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i ^ mask;
    const double wr = ws[2 * i], wi = ws[2 * i + 1];
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    ys[2 * j] += wr * xr - wi * xi;
    ys[2 * j + 1] += wr * xi + wi * xr;
  }
}

double norm2(std::size_t n, const cplx* x) {
  const double* xs = re(x);
  double s = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) s += xs[i] * xs[i];
  return s;
}

cplx dot(std::size_t n, const cplx* x, const cplx* y) {
  const double* xs = re(x);
  const double* ys = re(y);
  double sr = 0.0, si = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    const double yr = ys[2 * i], yi = ys[2 * i + 1];
    sr += xr * yr + xi * yi;
    si += xr * yi - xi * yr;
  }
  return {sr, si};
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar, "scalar", caxpy, raxpy, her_rank1, flip_apply, norm2, dot};
  return table;
}

}  // namespace deepthermal::simd
