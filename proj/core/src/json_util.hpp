// Internal JSON helpers shared by the module translation units. Not part
// of the public headers so nlohmann/json stays out of the installed API.
#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <json.hpp>

#include "tref6/errors.hpp"
#include "tref6/types.hpp"

namespace tref6::detail {

using nlohmann::json;

inline json to_json_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) {
    throw ParseError(std::string(what) + ": expected a non-empty array of rows");
  }
  const std::size_t cols = rows.front().is_array() ? rows.front().size() : 0;
  if (cols == 0) throw ParseError(std::string(what) + ": rows must be non-empty arrays");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const json& row = rows[r];
    if (!row.is_array() || row.size() != cols) {
      throw ParseError(std::string(what) + ": ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw ParseError(std::string(what) + ": non-numeric entry");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return m;
}

inline json to_json_vec(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline Eigen::VectorXd vector_from_json(const json& arr, const char* what) {
  if (!arr.is_array() || arr.empty()) {
    throw ParseError(std::string(what) + ": expected a non-empty numeric array");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw ParseError(std::string(what) + ": non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

// Quaternions serialize as [w, x, y, z].
inline json to_json_quat(const Eigen::Quaterniond& q) {
  return json::array({q.w(), q.x(), q.y(), q.z()});
}

inline Eigen::Quaterniond quat_from_json(const json& arr, const char* what) {
  if (!arr.is_array() || arr.size() != 4) {
    throw ParseError(std::string(what) + ": expected [w,x,y,z]");
  }
  return Eigen::Quaterniond(arr[0].get<double>(), arr[1].get<double>(),
                            arr[2].get<double>(), arr[3].get<double>());
}

// Frames serialize as origin + row-major 3x3 rotation.
inline json to_json_frame(const Frame6& f) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r) {
    rot.push_back(json::array({f.rotation(r, 0), f.rotation(r, 1), f.rotation(r, 2)}));
  }
  return json{{"origin", json::array({f.origin[0], f.origin[1], f.origin[2]})},
              {"rotation", rot}};
}

inline Frame6 frame_from_json(const json& j) {
  if (!j.contains("origin") || !j.contains("rotation")) {
    throw ParseError("frame: missing origin or rotation");
  }
  Frame6 f;
  Eigen::VectorXd o = vector_from_json(j.at("origin"), "frame origin");
  if (o.size() != 3) throw ParseError("frame origin must have 3 components");
  f.origin = o;
  Eigen::MatrixXd r = matrix_from_json(j.at("rotation"), "frame rotation");
  if (r.rows() != 3 || r.cols() != 3) throw ParseError("frame rotation must be 3x3");
  f.rotation = r;
  return f;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return j;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace tref6::detail
