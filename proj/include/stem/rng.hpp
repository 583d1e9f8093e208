#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace stem {

/// SplitMix64 step: advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Mixes a base seed with a stream index into an independent sub-seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// xoshiro256** seeded through SplitMix64. The output stream is fully
/// determined by the seed on every platform; nothing here reads the
/// system entropy pool.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t next() noexcept;

  /// Uniform integer in [0, bound). bound must be > 0. Lemire's
  /// multiply-shift with rejection, so the result is unbiased.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform() noexcept;

  /// k distinct indices from [0, population), in draw order
  /// (partial Fisher-Yates).
  std::vector<std::size_t> sample_indices(std::size_t population, std::size_t k);

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace stem
