#pragma once

#include <cstdint>
#include <string_view>

namespace deepthermal {

/// Counter-based random stream.
///
/// Algorithm (reproducible from any language):
///   key     = splitmix64_mix(seed XOR fnv1a64(purpose))
///   word(i) = splitmix64_mix(key + (i + 1) * 0x9E3779B97F4A7C15), i = 0, 1, ...
///   uniform = (word >> 11) * 2^-53                          in [0, 1)
///   normal  = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)            two consecutive uniforms
///
/// One stream per named purpose ("syk", "angles", "typical:<i>", "reference:<i>").
/// The i-th word is a pure function of (seed, purpose, i).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view purpose);

  std::uint64_t next_u64();
  double uniform();
  double normal();

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

}  // namespace deepthermal
