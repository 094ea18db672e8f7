#pragma once

#include "tref6/rng.hpp"
#include "tref6/scoring.hpp"
#include "tref6/types.hpp"

namespace tref6::inference {

enum class InitMode { structured, random };

struct OptimizerConfig {
  double learning_rate = 0.05;
  int steps = 500;
  int top_k = 5;
  double init_sigma = 0.5;      // meters, structured-init jitter
  double fd_step = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double convergence_tol = 1e-6;  // on gradient norm
  InitMode init_mode = InitMode::structured;
};

/// Structured initialization: centroid of the positions at the k timesteps
/// with the largest acceleration norm (ties broken toward earlier steps),
/// plus isotropic Gaussian jitter of scale sigma.
InfluencePoint topk_init(const Trajectory& traj, int k, double sigma, const RngSpec& rng);

/// Gradient ascent on the selected score with finite-difference gradients
/// smoothed by Adam. Returns the best-scoring iterate visited (which is
/// never worse than the initialization point). Stops early once the
/// gradient norm drops below the tolerance; if iterates leave the finite
/// range the best finite iterate is returned with converged = false.
InferenceResult optimize(const scoring::ScoreFunction& score, const Trajectory& traj,
                         const OptimizerConfig& cfg, const RngSpec& rng);

/// Closed-form least squares point minimizing the orthogonal distance to
/// the rays (x_t, a_t/||a_t||). Samples with near-zero acceleration are
/// skipped; throws DegenerateRays when fewer than two usable rays remain
/// or the normal equations are ill-conditioned (condition number > 1e10).
InfluencePoint triangulate(const Trajectory& traj);

/// First `len` samples of a trajectory (dt and dim preserved).
Trajectory truncate(const Trajectory& traj, int len);

/// Samples [begin, begin + len) of a trajectory.
Trajectory slice(const Trajectory& traj, int begin, int len);

/// optimize() on the first prefix_len samples.
InferenceResult infer_partial(const scoring::ScoreFunction& score, const Trajectory& traj,
                              int prefix_len, const OptimizerConfig& cfg, const RngSpec& rng);

struct SequentialResult {
  InferenceResult first;
  InferenceResult second;
};

/// Splits the trajectory at switch_step and infers one influence point per
/// segment, each with an independently derived RNG stream.
SequentialResult infer_sequential(const scoring::ScoreFunction& score, const Trajectory& traj,
                                  int switch_step, const OptimizerConfig& cfg,
                                  const RngSpec& rng);

}  // namespace tref6::inference
