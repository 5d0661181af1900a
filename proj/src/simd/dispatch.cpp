#include <atomic>
#include <cstdlib>
#include <string>

#include "deepthermal/error.hpp"
#include "deepthermal/simd/kernels.hpp"

namespace deepthermal::simd {

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

namespace {

const KernelTable* detect() {
  if (const char* env = std::getenv("DEEPTHERMAL_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2" && cpu_supports(Isa::Avx2)) return avx2_kernels();
  }
  if (cpu_supports(Isa::Avx2)) return avx2_kernels();
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void select(Isa isa) {
  if (!cpu_supports(isa)) throw ValidationError("simd: ISA not available: " + std::string(isa_name(isa)));
  slot().store(isa == Isa::Avx2 ? avx2_kernels() : &scalar_kernels(), std::memory_order_release);
}

}  // namespace deepthermal::simd
