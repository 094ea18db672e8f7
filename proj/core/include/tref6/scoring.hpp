#pragma once

#include "tref6/types.hpp"

namespace tref6::scoring {

enum class ScoreKind {
  directional_consistency,
  cosine_similarity,
  quadratic_residual,
};

/// Selects one of the three candidate-point scores. All scores follow a
/// unified maximize-me convention: larger is always better.
struct ScoreFunction {
  ScoreKind kind = ScoreKind::directional_consistency;
  double epsilon = 1e-6;
};

/// Negative mean norm of the difference between the epsilon-regularized
/// unit vector from x_t toward p and the observed acceleration:
///   S(p) = -(1/T) sum_t || (p - x_t) / (||p - x_t|| + eps) - a_t ||
/// Always <= 0; finite even when p coincides with a sample.
double directional_consistency_score(const Trajectory& traj, const InfluencePoint& p,
                                     double epsilon = 1e-6);

/// Mean absolute cosine between (p - x_t) and a_t, regularized by epsilon
/// in the denominator. In [0, 1] up to the epsilon slack. Note the absolute
/// value makes it blind to approach-vs-recede direction.
double cosine_similarity_score(const Trajectory& traj, const InfluencePoint& p,
                               double epsilon = 1e-6);

/// Negative mean squared residual between the unnormalized offset and the
/// acceleration: -(1/T) sum_t ||(p - x_t) - a_t||^2. Negated so larger is
/// better; its analytic maximizer is mean(x_t + a_t).
double quadratic_residual_score(const Trajectory& traj, const InfluencePoint& p);

double evaluate(const ScoreFunction& score, const Trajectory& traj, const InfluencePoint& p);

/// Central-finite-difference gradient estimate of the selected score,
/// component i = (S(p + h e_i) - S(p - h e_i)) / (2h).
Eigen::VectorXd fd_gradient(const ScoreFunction& score, const Trajectory& traj,
                            const InfluencePoint& p, double step = 1e-4);

}  // namespace tref6::scoring
