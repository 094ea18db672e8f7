#pragma once

#include <filesystem>

#include "tref6/types.hpp"

namespace tref6 {

enum class Format { json, csv };

/// Loads a trajectory from disk. JSON schema:
///   {"dim":3,"dt":0.05,"positions":[[..]],"accelerations":[[..]]?,
///    "orientations":[[w,x,y,z]]?}
/// CSV header: t,x,y[,z][,ax,ay[,az]], rows in time order.
/// Accelerations absent from the file are filled in with
/// numeric_accelerations.
Trajectory load_trajectory(const std::filesystem::path& path, Format format);

/// Picks the format from the file extension (.json / .csv).
Trajectory load_trajectory(const std::filesystem::path& path);

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj,
                     Format format = Format::json);

}  // namespace tref6
