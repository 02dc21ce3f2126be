#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pwspd {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for a sub-stream identified by a path of indices, e.g.
/// derive_seed(seed, {cell, trial}).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

/// Reproducible random stream.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard.
/// All variate conversions are implemented here rather than via the
/// std distributions, whose algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// Poisson variate with the given mean.
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace pwspd
