#include "tref6/types.hpp"

#include <cmath>
#include <string>

namespace tref6 {

void Trajectory::validate() const {
  if (dim != 2 && dim != 3) {
    throw ValidationError("trajectory dim must be 2 or 3, got " + std::to_string(dim));
  }
  if (!(dt > 0.0)) {
    throw ValidationError("trajectory dt must be positive");
  }
  const Eigen::Index T = positions.rows();
  if (T < 2) {
    throw ValidationError("trajectory needs at least 2 samples, got " + std::to_string(T));
  }
  if (positions.cols() != dim || accelerations.cols() != dim) {
    throw ValidationError("position/acceleration width does not match dim");
  }
  if (accelerations.rows() != T) {
    throw ValidationError("positions and accelerations must have equal length (" +
                          std::to_string(T) + " vs " + std::to_string(accelerations.rows()) + ")");
  }
  if (!positions.allFinite() || !accelerations.allFinite()) {
    throw ValidationError("trajectory contains non-finite values");
  }
  if (!orientations.empty()) {
    if (dim != 3) {
      throw ValidationError("orientations are only supported for 3D trajectories");
    }
    if (static_cast<Eigen::Index>(orientations.size()) != T) {
      throw ValidationError("orientations length does not match trajectory length");
    }
    for (const auto& q : orientations) {
      if (!std::isfinite(q.w()) || !q.vec().allFinite()) {
        throw ValidationError("non-finite orientation quaternion");
      }
      if (std::abs(q.norm() - 1.0) > 1e-9) {
        throw ValidationError("orientation quaternion is not unit-norm");
      }
    }
  }
}

Eigen::MatrixXd numeric_accelerations(const Eigen::MatrixXd& positions, double dt) {
  const Eigen::Index T = positions.rows();
  if (T < 3) {
    throw ValidationError("numeric accelerations need at least 3 samples");
  }
  if (!(dt > 0.0)) {
    throw ValidationError("numeric accelerations need dt > 0");
  }
  Eigen::MatrixXd accel(T, positions.cols());
  const double inv_dt2 = 1.0 / (dt * dt);
  for (Eigen::Index t = 1; t + 1 < T; ++t) {
    accel.row(t) = (positions.row(t + 1) - 2.0 * positions.row(t) + positions.row(t - 1)) * inv_dt2;
  }
  accel.row(0) = accel.row(1);
  accel.row(T - 1) = accel.row(T - 2);
  return accel;
}

double mede(const InfluencePoint& predicted, const InfluencePoint& truth) {
  if (predicted.size() != truth.size()) {
    throw DimensionMismatch("mede: operands have different dimensions");
  }
  return (predicted - truth).norm();
}

void Frame6::validate() const {
  if (!origin.allFinite() || !rotation.allFinite()) {
    throw ValidationError("frame contains non-finite values");
  }
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9) {
    throw ValidationError("frame rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > 1e-9) {
    throw ValidationError("frame rotation is not right-handed");
  }
}

}  // namespace tref6
