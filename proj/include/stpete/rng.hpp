#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, counter), so any partition of the draws across threads
// reproduces the same values.

#include <cstdint>

namespace stpete {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for an independent experiment derived from a base seed, e.g. one
/// repetition out of many.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t bits(std::uint64_t counter) const noexcept;
  /// Uniform on (0, 1] with 53 random bits.
  double uniform(std::uint64_t counter) const noexcept;

 private:
  std::uint64_t key_;
};

/// Sequential view of one stream.
class Substream {
 public:
  Substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t start = 0) noexcept
      : rng_(seed, stream), counter_(start) {}

  double uniform() noexcept { return rng_.uniform(counter_++); }
  std::uint64_t position() const noexcept { return counter_; }

 private:
  CounterRng rng_;
  std::uint64_t counter_;
};

}  // namespace stpete
