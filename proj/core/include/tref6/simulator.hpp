#pragma once

#include <filesystem>
#include <optional>

#include "tref6/rng.hpp"
#include "tref6/types.hpp"

namespace tref6::sim {

/// Point-mass episode configuration. noise_level maps the single noise
/// dial to additive N(0, nu^2 I) on the unit force direction (before
/// renormalization) and multiplicative (1 + nu N(0,1)), clamped at zero,
/// on the force magnitude.
struct SimConfig {
  int dim = 3;
  int steps = 100;
  double dt = 0.05;
  double noise_level = 0.0;                      // nu in [0, 1]
  Eigen::Vector2d v0_range{-0.5, 0.5};           // per axis
  Eigen::Vector2d p_range{-5.0, 5.0};            // per axis
  std::optional<Eigen::VectorXd> second_point;   // two-phase target
  std::optional<int> switch_step;                // present iff second_point
  double damping = 0.1;                          // 1/s

  void validate() const;
};

struct SimEpisode {
  Trajectory trajectory;                     // accelerations = applied
  InfluencePoint truth;
  std::optional<InfluencePoint> truth2;
  std::optional<int> switch_step;
  Eigen::MatrixXd applied_accelerations;     // T x dim, includes damping
  SimConfig config;
  RngSpec seed;
};

/// Runs one episode: start at the origin with uniform random velocity,
/// attract toward a uniformly placed influence point with force magnitude
/// alpha_t ~ U(0, distance), integrate semi-implicit Euler. When a second
/// point is configured the target switches at switch_step and the velocity
/// carries over.
SimEpisode simulate(const SimConfig& cfg, const RngSpec& rng);

enum class AccelMode { recorded, differentiated };

/// View of an episode ready for inference: either the recorded applied
/// accelerations or central differences of the positions.
Trajectory accelerations_for_inference(const SimEpisode& episode, AccelMode mode);

void save_episode(const std::filesystem::path& path, const SimEpisode& episode);
SimEpisode load_episode(const std::filesystem::path& path);

}  // namespace tref6::sim
