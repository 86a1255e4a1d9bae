#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tfwf {

/// SplitMix64 finalizer; used to derive independent substream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for the substream addressed by (seed, keys...).
std::uint64_t substream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

/// Reproducible Gaussian/uniform source.
///
/// Engine: std::mt19937_64 (bit-exact across standard libraries), seeded from
/// substream_seed. Uniforms take the top 53 bits; normals use Box-Muller.
/// The standard library distributions are avoided since their output is
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys = {});

  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal.
  double normal();
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tfwf
