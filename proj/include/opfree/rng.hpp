#pragma once

#include <cstdint>

#include "opfree/dense_matrix.hpp"

namespace opfree {

/// Seed for every randomized operation. Identical seeds reproduce identical
/// outputs bit-for-bit on any platform.
struct Seed {
  std::uint64_t value = 0;

  /// Independent child seed for sub-stream `stream` (SplitMix64 of a mixed key).
  Seed split(std::uint64_t stream) const noexcept;

  friend bool operator==(Seed, Seed) = default;
};

/// xoshiro256** seeded through SplitMix64.
///
/// Gaussian draws use the Marsaglia polar method on top of uniform(), so the
/// stream is fully specified here and does not depend on the standard
/// library's distribution implementations.
class Rng {
 public:
  explicit Rng(Seed seed) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept;
  /// Uniform integer on [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept;
  double normal() noexcept;

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace opfree
