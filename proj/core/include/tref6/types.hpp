#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "tref6/errors.hpp"

namespace tref6 {

/// Candidate or estimated influence point (size 2 or 3, meters).
using InfluencePoint = Eigen::VectorXd;

/// Time-indexed positions and accelerations with a fixed timestep.
/// Orientations are optional and only meaningful in 3D.
struct Trajectory {
  int dim = 3;
  double dt = 0.05;                               // seconds per step
  Eigen::MatrixXd positions;                      // T x dim, meters
  Eigen::MatrixXd accelerations;                  // T x dim, m/s^2
  std::vector<Eigen::Quaterniond> orientations;   // empty, or length T

  Eigen::Index length() const { return positions.rows(); }

  /// Throws ValidationError on any broken invariant (T < 2, length
  /// mismatch, non-finite entries, non-unit orientations).
  void validate() const;
};

/// Central second differences; endpoint samples copy their nearest
/// interior value so the output has the same length as the input.
Eigen::MatrixXd numeric_accelerations(const Eigen::MatrixXd& positions, double dt);

/// Euclidean distance between an estimate and ground truth (the per-trial
/// quantity behind the benchmark's mean distance error).
double mede(const InfluencePoint& predicted, const InfluencePoint& truth);

/// Task-relevant 6-DoF frame: origin plus right-handed orthonormal
/// rotation whose columns are the x, y, z axes.
struct Frame6 {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();

  Eigen::Vector3d x_axis() const { return rotation.col(0); }
  Eigen::Vector3d y_axis() const { return rotation.col(1); }
  Eigen::Vector3d z_axis() const { return rotation.col(2); }

  void validate() const;  // orthonormality and det = +1 within 1e-9
};

struct InferenceResult {
  InfluencePoint point;
  double score = 0.0;
  int iterations = 0;
  InfluencePoint init_point;
  bool converged = false;
};

}  // namespace tref6
