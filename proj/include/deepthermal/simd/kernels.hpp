#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2/FMA version; the active table is chosen once at runtime
// (CPUID, overridable with DEEPTHERMAL_SIMD=scalar|avx2).

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "deepthermal/types.hpp"

namespace deepthermal::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  // y += a * x
  void (*caxpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
  // y += a * x, x real
  void (*raxpy)(std::size_t n, cplx a, const double* x, cplx* y);
  // m += w * v v^dagger, m column-major n x n
  void (*her_rank1)(std::size_t n, double w, const cplx* v, cplx* m);
  // y[i ^ mask] += w[i] * x[i] for i < n; n is a power of two > mask
  void (*flip_apply)(std::size_t n, std::uint64_t mask, const cplx* w, const cplx* x, cplx* y);
  // sum |x_i|^2
  double (*norm2)(std::size_t n, const cplx* x);
  // sum conj(x_i) y_i
  cplx (*dot)(std::size_t n, const cplx* x, const cplx* y);
};

const KernelTable& scalar_kernels();

// Null when the AVX2 translation unit was not built.
const KernelTable* avx2_kernels();

bool cpu_supports(Isa isa);

// The table used by the library.
const KernelTable& active();

// Force a table; throws ValidationError if the ISA is unavailable.
void select(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace deepthermal::simd
