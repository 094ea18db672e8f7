#include "tref6/framekit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "json_util.hpp"

namespace tref6::framekit {

void PointCloud::validate() const {
  if (points.size() < 3) throw ValidationError("point cloud needs at least 3 points");
  for (const auto& p : points) {
    if (!p.allFinite()) throw ValidationError("point cloud contains non-finite points");
  }
  if (viewpoint && !viewpoint->allFinite()) {
    throw ValidationError("point cloud viewpoint is not finite");
  }
}

Eigen::Vector3d estimate_normal(const PointCloud& cloud, const Eigen::Vector3d& at,
                                int k_neighbors) {
  cloud.validate();
  const int n = static_cast<int>(cloud.points.size());
  if (k_neighbors < 3 || k_neighbors > n) {
    throw ValidationError("k_neighbors must be in [3, cloud size]");
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) dist2[static_cast<std::size_t>(i)] = (cloud.points[static_cast<std::size_t>(i)] - at).squaredNorm();
  std::partial_sort(order.begin(), order.begin() + k_neighbors, order.end(),
                    [&](int a, int b) {
                      const double da = dist2[static_cast<std::size_t>(a)];
                      const double db = dist2[static_cast<std::size_t>(b)];
                      if (da != db) return da < db;
                      return a < b;
                    });

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (int i = 0; i < k_neighbors; ++i) mean += cloud.points[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  mean /= static_cast<double>(k_neighbors);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (int i = 0; i < k_neighbors; ++i) {
    const Eigen::Vector3d d = cloud.points[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(k_neighbors);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Eigen::Vector3d eval = es.eigenvalues();  // ascending
  const double scale = eval[2];
  if (!(scale > 0.0) || eval[1] - eval[0] <= 1e-9 * scale) {
    throw DegenerateNeighborhood("neighborhood has no well-defined normal direction");
  }
  Eigen::Vector3d normal = es.eigenvectors().col(0);
  normal.normalize();

  const Eigen::Vector3d toward =
      cloud.viewpoint ? (*cloud.viewpoint - at).eval() : Eigen::Vector3d(0, 0, 1);
  if (normal.dot(toward) < 0.0) normal = -normal;
  return normal;
}

Frame6 build_frame(const Eigen::Vector3d& refined_point, const Eigen::Vector3d& normal,
                   const Eigen::Vector3d& interaction_point) {
  if (std::abs(normal.norm() - 1.0) > 1e-6) {
    throw ValidationError("frame normal must be unit length");
  }
  const Eigen::Vector3d offset = interaction_point - refined_point;
  if (offset.norm() <= 1e-12) {
    throw ValidationError("interaction point coincides with the refined point");
  }
  const Eigen::Vector3d v = offset.normalized();
  const Eigen::Vector3d cross = v.cross(normal);
  if (cross.norm() < 1e-6) {
    throw DegenerateDirection("interaction direction is parallel to the normal");
  }
  Frame6 frame;
  frame.origin = refined_point;
  const Eigen::Vector3d x = cross.normalized();
  const Eigen::Vector3d y = normal.cross(x);
  frame.rotation.col(0) = x;
  frame.rotation.col(1) = y;
  frame.rotation.col(2) = normal;
  return frame;
}

PointCloud load_point_cloud(const std::filesystem::path& path) {
  using detail::json;
  const json j = detail::read_json_file(path);
  if (!j.contains("points")) throw ParseError(path.string() + ": missing points");
  PointCloud cloud;
  const Eigen::MatrixXd pts = detail::matrix_from_json(j.at("points"), "points");
  if (pts.cols() != 3) throw ParseError("point cloud points must have 3 components");
  cloud.points.reserve(static_cast<std::size_t>(pts.rows()));
  for (Eigen::Index r = 0; r < pts.rows(); ++r) cloud.points.emplace_back(pts.row(r).transpose());
  if (j.contains("viewpoint") && !j.at("viewpoint").is_null()) {
    const Eigen::VectorXd vp = detail::vector_from_json(j.at("viewpoint"), "viewpoint");
    if (vp.size() != 3) throw ParseError("viewpoint must have 3 components");
    cloud.viewpoint = Eigen::Vector3d(vp);
  }
  cloud.validate();
  return cloud;
}

void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  using detail::json;
  json pts = json::array();
  for (const auto& p : cloud.points) pts.push_back(json::array({p[0], p[1], p[2]}));
  json j{{"points", std::move(pts)}};
  if (cloud.viewpoint) {
    const auto& v = *cloud.viewpoint;
    j["viewpoint"] = json::array({v[0], v[1], v[2]});
  }
  detail::write_json_file(path, j);
}

Frame6 load_frame(const std::filesystem::path& path) {
  Frame6 frame = detail::frame_from_json(detail::read_json_file(path));
  frame.validate();
  return frame;
}

void save_frame(const std::filesystem::path& path, const Frame6& frame) {
  detail::write_json_file(path, detail::to_json_frame(frame));
}

}  // namespace tref6::framekit
