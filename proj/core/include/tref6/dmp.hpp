#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "tref6/types.hpp"

namespace tref6::dmp {

/// Pose sequence (position + orientation) together with the frame it is
/// expressed in. World-frame trajectories carry an identity frame.
struct PoseTrajectory {
  double dt = 0.05;
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Quaterniond> orientations;
  Frame6 frame;

  std::size_t length() const { return positions.size(); }
  void validate() const;
};

/// x_local = R^T (x_world - origin), q_local = R_q^-1 * q_world.
PoseTrajectory to_local(const PoseTrajectory& pose_world, const Frame6& frame);

/// Inverse of to_local; the result carries an identity frame.
PoseTrajectory to_world(const PoseTrajectory& pose_local, const Frame6& frame);

struct RelativeMotion {
  std::vector<Eigen::Vector3d> dx;          // x_t - x_0
  std::vector<Eigen::Quaterniond> dq;       // q_t * q_0^-1
};

/// Relative motion from the starting pose; dx[0] is exactly zero and dq[0]
/// exactly identity.
RelativeMotion relative_motion(const PoseTrajectory& local);

struct DmpParams {
  double alpha_z = 25.0;
  double alpha_s = 4.0;
  int n_basis = 20;
};

enum class DmpChannel { position, orientation };

/// Second-order goal-convergent system with a phase-driven forcing term.
/// The orientation channel operates on rotation vectors so outputs stay on
/// the unit-quaternion manifold.
struct DmpModel {
  DmpChannel channel = DmpChannel::position;
  double alpha_z = 25.0;
  double beta_z = 6.25;               // alpha_z / 4, critical damping
  double alpha_s = 4.0;
  double tau = 1.0;                   // demo duration, seconds
  int n_basis = 20;
  Eigen::VectorXd centers;            // strictly decreasing in (0, 1]
  Eigen::VectorXd widths;
  Eigen::MatrixXd weights;            // n_basis x 3
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();   // dx_T or r_T
  double anchor_distance = 0.0;       // ||p* - x0_demo||, position channel
  std::array<bool, 3> degenerate_axis{false, false, false};

  void validate() const;
};

/// Fits per-axis forcing weights to reproduce the displacement demo.
/// Goal components below 1e-9 in magnitude get zero weights and are
/// flagged in degenerate_axis.
DmpModel fit_position_dmp(const std::vector<Eigen::Vector3d>& dx, double dt,
                          const DmpParams& params = {});

/// Converts the quaternion displacements to continuity-corrected rotation
/// vectors (2 log dq) and fits a 3-channel model with goal r_T. Throws
/// AngleWrap when successive rotations jump by ~pi (ambiguous unwrap).
DmpModel fit_quaternion_dmp(const std::vector<Eigen::Quaterniond>& dq, double dt,
                            const DmpParams& params = {});

/// Deployment goal: demo displacement rescaled by the ratio of new-to-demo
/// anchor distances from the influence point to the start position.
Eigen::Vector3d deploy_goal(const DmpModel& model, const Eigen::Vector3d& x0_new,
                            const Eigen::Vector3d& p_star, const Eigen::Vector3d& x0_demo);

/// Integrates the model toward deploy_goal(...) and emits x0_new + y_t.
/// All points must be expressed in one consistent frame.
std::vector<Eigen::Vector3d> rollout_position(const DmpModel& model,
                                              const Eigen::Vector3d& x0_new,
                                              const Eigen::Vector3d& p_star,
                                              const Eigen::Vector3d& x0_demo,
                                              int steps, double dt);

/// Same as rollout_position but scaling against a stored anchor distance
/// instead of an explicit demo start.
std::vector<Eigen::Vector3d> rollout_position_anchored(const DmpModel& model,
                                                       const Eigen::Vector3d& x0_new,
                                                       const Eigen::Vector3d& p_star,
                                                       double anchor_distance,
                                                       int steps, double dt);

/// Rolls out rotation vectors and emits exp(r_t / 2) * q0_new, all
/// unit-norm. No spatial goal scaling on the orientation channel.
std::vector<Eigen::Quaterniond> rollout_quaternion(const DmpModel& model,
                                                   const Eigen::Quaterniond& q0_new,
                                                   int steps, double dt);

/// Forcing term at phase s for a given (possibly rescaled) goal.
Eigen::Vector3d forcing_term(const DmpModel& model, double s, const Eigen::Vector3d& goal);

/// Rotation vector of a unit quaternion (canonical angle in [0, pi]);
/// equals 2 log q.
Eigen::Vector3d rotation_vector(const Eigen::Quaterniond& q);

/// Unit quaternion for a rotation vector; inverse of rotation_vector.
Eigen::Quaterniond quat_from_rotation_vector(const Eigen::Vector3d& r);

void save_model(const std::filesystem::path& path, const DmpModel& model);
DmpModel load_model(const std::filesystem::path& path);

/// Position + orientation channels fit from one pose demo, stored together.
struct DmpPair {
  DmpModel position;
  DmpModel orientation;
};

void save_model_pair(const std::filesystem::path& path, const DmpPair& pair);
DmpPair load_model_pair(const std::filesystem::path& path);

void save_pose_trajectory(const std::filesystem::path& path, const PoseTrajectory& pose);
PoseTrajectory load_pose_trajectory(const std::filesystem::path& path);

}  // namespace tref6::dmp
