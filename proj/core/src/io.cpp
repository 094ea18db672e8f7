#include "tref6/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json_util.hpp"

namespace tref6 {

namespace {

using detail::json;

Trajectory trajectory_from_json_obj(const json& j) {
  if (!j.is_object()) throw ParseError("trajectory: expected a JSON object");
  Trajectory traj;
  if (!j.contains("positions")) throw ParseError("trajectory: missing positions");
  traj.positions = detail::matrix_from_json(j.at("positions"), "positions");
  traj.dim = j.contains("dim") ? j.at("dim").get<int>()
                               : static_cast<int>(traj.positions.cols());
  traj.dt = j.contains("dt") ? j.at("dt").get<double>() : 0.05;
  if (j.contains("accelerations") && !j.at("accelerations").is_null()) {
    traj.accelerations = detail::matrix_from_json(j.at("accelerations"), "accelerations");
  } else {
    traj.accelerations = numeric_accelerations(traj.positions, traj.dt);
  }
  if (j.contains("orientations") && !j.at("orientations").is_null()) {
    for (const auto& q : j.at("orientations")) {
      traj.orientations.push_back(detail::quat_from_json(q, "orientation"));
    }
  }
  traj.validate();
  return traj;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

Trajectory load_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());

  std::string header_line;
  if (!std::getline(in, header_line)) throw ParseError(path.string() + ": empty file");
  std::vector<std::string> header = split_csv_line(header_line);
  for (auto& h : header) h = trim(h);

  int dim = 0;
  bool has_accel = false;
  if (header.size() >= 3 && header[0] == "t" && header[1] == "x" && header[2] == "y") {
    dim = (header.size() > 3 && header[3] == "z") ? 3 : 2;
    const std::size_t expect_plain = static_cast<std::size_t>(1 + dim);
    const std::size_t expect_accel = static_cast<std::size_t>(1 + 2 * dim);
    if (header.size() == expect_plain) {
      has_accel = false;
    } else if (header.size() == expect_accel && header[1 + dim] == "ax") {
      has_accel = true;
    } else {
      throw ParseError(path.string() + ": unrecognized CSV header");
    }
  } else {
    throw ParseError(path.string() + ": CSV header must start with t,x,y");
  }

  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(path.string() + ": row width does not match header");
    }
    std::vector<double> vals;
    for (const auto& f : fields) {
      try {
        vals.push_back(std::stod(trim(f)));
      } catch (const std::exception&) {
        throw ParseError(path.string() + ": non-numeric CSV field '" + f + "'");
      }
    }
    times.push_back(vals[0]);
    rows.push_back(std::vector<double>(vals.begin() + 1, vals.end()));
  }
  if (rows.size() < 2) throw ValidationError(path.string() + ": need at least 2 rows");

  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw ParseError(path.string() + ": time column must be strictly increasing");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - times[0] - static_cast<double>(i) * dt) > 1e-6 * dt * static_cast<double>(i + 1)) {
      throw ParseError(path.string() + ": non-uniform timestep in CSV");
    }
  }

  Trajectory traj;
  traj.dim = dim;
  traj.dt = dt;
  const Eigen::Index T = static_cast<Eigen::Index>(rows.size());
  traj.positions.resize(T, dim);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (int c = 0; c < dim; ++c) traj.positions(t, c) = rows[t][static_cast<std::size_t>(c)];
  }
  if (has_accel) {
    traj.accelerations.resize(T, dim);
    for (Eigen::Index t = 0; t < T; ++t) {
      for (int c = 0; c < dim; ++c) {
        traj.accelerations(t, c) = rows[t][static_cast<std::size_t>(dim + c)];
      }
    }
  } else {
    traj.accelerations = numeric_accelerations(traj.positions, dt);
  }
  traj.validate();
  return traj;
}

void save_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << (traj.dim == 3 ? "t,x,y,z,ax,ay,az" : "t,x,y,ax,ay") << '\n';
  char buf[32];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << sep;
  };
  for (Eigen::Index t = 0; t < traj.length(); ++t) {
    put(static_cast<double>(t) * traj.dt, ',');
    for (int c = 0; c < traj.dim; ++c) put(traj.positions(t, c), ',');
    for (int c = 0; c < traj.dim; ++c) put(traj.accelerations(t, c), c + 1 == traj.dim ? '\n' : ',');
  }
}

}  // namespace

Trajectory load_trajectory(const std::filesystem::path& path, Format format) {
  if (format == Format::csv) return load_trajectory_csv(path);
  return trajectory_from_json_obj(detail::read_json_file(path));
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  return load_trajectory(path, path.extension() == ".csv" ? Format::csv : Format::json);
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj, Format format) {
  traj.validate();
  if (format == Format::csv) {
    save_trajectory_csv(path, traj);
    return;
  }
  json j{{"dim", traj.dim},
         {"dt", traj.dt},
         {"positions", detail::to_json_rows(traj.positions)},
         {"accelerations", detail::to_json_rows(traj.accelerations)}};
  if (!traj.orientations.empty()) {
    json quats = json::array();
    for (const auto& q : traj.orientations) quats.push_back(detail::to_json_quat(q));
    j["orientations"] = std::move(quats);
  }
  detail::write_json_file(path, j);
}

}  // namespace tref6
