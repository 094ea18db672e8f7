#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace tref6 {

// splitmix64 step: scrambles and advances a 64-bit state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Identifies one reproducible random stream: equal specs give bit-identical
/// sequences, distinct stream indices give independent sequences.
struct RngSpec {
  std::uint64_t base_seed = 0;
  std::uint64_t stream_index = 0;

  // Derives a child stream; different salts give independent streams under
  // the same base seed.
  RngSpec derive(std::uint64_t salt) const {
    std::uint64_t s = stream_index + 0x9E3779B97F4A7C15ull * (salt + 1);
    return RngSpec{base_seed, splitmix64(s)};
  }
};

/// xoshiro256** generator seeded from an RngSpec through a splitmix64
/// scrambler. Distributions are implemented here rather than with
/// <random> so that sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(const RngSpec& spec);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform01();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Standard Gaussian via Box-Muller (cosine branch; two uniforms per draw).
  double normal();

  Eigen::VectorXd uniform_vec(int dim, double lo, double hi);
  Eigen::VectorXd normal_vec(int dim);

 private:
  std::array<std::uint64_t, 4> state_;
};

}  // namespace tref6
