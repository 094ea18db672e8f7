#include "tref6/rng.hpp"

#include <cmath>

namespace tref6 {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

Rng::Rng(const RngSpec& spec) {
  // Fold base seed and stream index through splitmix64 before filling the
  // xoshiro state, so adjacent seeds/streams land far apart.
  std::uint64_t s = spec.base_seed;
  std::uint64_t whitened = splitmix64(s);
  s = whitened ^ (spec.stream_index + 0x9E3779B97F4A7C15ull);
  (void)splitmix64(s);
  for (auto& word : state_) word = splitmix64(s);
  bool all_zero = true;
  for (auto word : state_) all_zero = all_zero && word == 0;
  if (all_zero) state_[0] = 1;  // xoshiro forbids the all-zero state
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + uniform01() * (hi - lo);
}

double Rng::normal() {
  double u1 = uniform01();
  if (u1 < 1e-300) u1 = 1e-300;
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Eigen::VectorXd Rng::uniform_vec(int dim, double lo, double hi) {
  Eigen::VectorXd out(dim);
  for (int i = 0; i < dim; ++i) out[i] = uniform(lo, hi);
  return out;
}

Eigen::VectorXd Rng::normal_vec(int dim) {
  Eigen::VectorXd out(dim);
  for (int i = 0; i < dim; ++i) out[i] = normal();
  return out;
}

}  // namespace tref6
