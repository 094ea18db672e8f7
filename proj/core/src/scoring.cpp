#include "tref6/scoring.hpp"

#include <cmath>

namespace tref6::scoring {

namespace {

void check_candidate(const Trajectory& traj, const InfluencePoint& p) {
  if (p.size() != traj.dim || traj.positions.cols() != traj.dim) {
    throw DimensionMismatch("score: candidate dimension does not match trajectory");
  }
}

}  // namespace

double directional_consistency_score(const Trajectory& traj, const InfluencePoint& p,
                                     double epsilon) {
  check_candidate(traj, p);
  if (!(epsilon > 0.0)) throw ValidationError("score epsilon must be positive");
  const Eigen::Index T = traj.length();
  const Eigen::RowVectorXd pt = p.transpose();
  double total = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::RowVectorXd offset = pt - traj.positions.row(t);
    const double dist = offset.norm();
    total += (offset / (dist + epsilon) - traj.accelerations.row(t)).norm();
  }
  return -total / static_cast<double>(T);
}

double cosine_similarity_score(const Trajectory& traj, const InfluencePoint& p,
                               double epsilon) {
  check_candidate(traj, p);
  if (!(epsilon > 0.0)) throw ValidationError("score epsilon must be positive");
  const Eigen::Index T = traj.length();
  const Eigen::RowVectorXd pt = p.transpose();
  double total = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::RowVectorXd offset = pt - traj.positions.row(t);
    const Eigen::RowVectorXd accel = traj.accelerations.row(t);
    total += std::abs(offset.dot(accel) / (offset.norm() * accel.norm() + epsilon));
  }
  return total / static_cast<double>(T);
}

double quadratic_residual_score(const Trajectory& traj, const InfluencePoint& p) {
  check_candidate(traj, p);
  const Eigen::Index T = traj.length();
  const Eigen::RowVectorXd pt = p.transpose();
  double total = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    total += (pt - traj.positions.row(t) - traj.accelerations.row(t)).squaredNorm();
  }
  return -total / static_cast<double>(T);
}

double evaluate(const ScoreFunction& score, const Trajectory& traj, const InfluencePoint& p) {
  switch (score.kind) {
    case ScoreKind::directional_consistency:
      return directional_consistency_score(traj, p, score.epsilon);
    case ScoreKind::cosine_similarity:
      return cosine_similarity_score(traj, p, score.epsilon);
    case ScoreKind::quadratic_residual:
      return quadratic_residual_score(traj, p);
  }
  throw ValidationError("unknown score kind");
}

Eigen::VectorXd fd_gradient(const ScoreFunction& score, const Trajectory& traj,
                            const InfluencePoint& p, double step) {
  if (!(step > 0.0)) throw ValidationError("finite-difference step must be positive");
  Eigen::VectorXd grad(p.size());
  Eigen::VectorXd probe = p;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    probe[i] = p[i] + step;
    const double hi = evaluate(score, traj, probe);
    probe[i] = p[i] - step;
    const double lo = evaluate(score, traj, probe);
    probe[i] = p[i];
    grad[i] = (hi - lo) / (2.0 * step);
  }
  return grad;
}

}  // namespace tref6::scoring
