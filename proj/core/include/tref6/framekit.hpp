#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "tref6/types.hpp"

namespace tref6::framekit {

struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::optional<Eigen::Vector3d> viewpoint;  // orients estimated normals

  void validate() const;  // >= 3 finite points
};

/// PCA surface normal at `at`: eigenvector of the smallest eigenvalue of
/// the covariance of the k nearest neighbors. The sign faces the viewpoint
/// when one is given, otherwise the +z half-space. Throws
/// DegenerateNeighborhood when the two smallest eigenvalues are not
/// separated (collinear or isotropic neighborhoods).
Eigen::Vector3d estimate_normal(const PointCloud& cloud, const Eigen::Vector3d& at,
                                int k_neighbors = 30);

/// Frame with origin at the refined point, z along the normal, and the
/// refined-to-interaction direction lying in the yz-plane. Axis sign
/// convention: x = normalize(v x z), y = z x x.
Frame6 build_frame(const Eigen::Vector3d& refined_point, const Eigen::Vector3d& normal,
                   const Eigen::Vector3d& interaction_point);

/// JSON: {"points":[[x,y,z]...],"viewpoint":[x,y,z]?}
PointCloud load_point_cloud(const std::filesystem::path& path);
void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud);

/// JSON: {"origin":[...],"rotation":[[...],[...],[...]]} (row-major).
Frame6 load_frame(const std::filesystem::path& path);
void save_frame(const std::filesystem::path& path, const Frame6& frame);

}  // namespace tref6::framekit
