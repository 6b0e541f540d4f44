#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace nnreflex {

/// Seeded 64-bit Mersenne Twister (std::mt19937_64) with portable variate
/// generation. The engine's output sequence is fixed by the C++ standard; all
/// derived variates are computed here rather than by <random> distributions,
/// whose algorithms differ between standard libraries.
///
/// Independent streams are derived from (seed, stream ids) through
/// std::seed_seq, so replicate r of a simulation draws the same numbers no
/// matter which worker runs it.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);
  static Rng for_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1); never returns 0.
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n), unbiased. n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal by the Box-Muller transform (one variate per call).
  double normal();
  /// Poisson variate: inversion for mean < 30, transformed rejection (PTRS) above.
  std::uint64_t poisson(double mean);

 private:
  explicit Rng(std::mt19937_64 engine) : engine_(engine) {}
  std::mt19937_64 engine_;
};

}  // namespace nnreflex
