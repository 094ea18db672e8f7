#include "tref6/dmp.hpp"

#include <cmath>
#include <string>

#include <Eigen/QR>

#include "json_util.hpp"

namespace tref6::dmp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegenerateGoal = 1e-9;

// Phase samples of the canonical system over the demo horizon. The phase
// uses the exact exponential update (see rollout) so s stays positive for
// arbitrarily short demos.
Eigen::VectorXd phase_sequence(int T, double dt, double alpha_s, double tau) {
  Eigen::VectorXd s(T);
  const double decay = std::exp(-alpha_s * dt / tau);
  s[0] = 1.0;
  for (int t = 1; t < T; ++t) s[t] = s[t - 1] * decay;
  return s;
}

void init_basis(DmpModel& model) {
  const int n = model.n_basis;
  model.centers.resize(n);
  model.widths.resize(n);
  // Log-spaced centers from 1 down to the end-of-demo phase exp(-alpha_s).
  for (int i = 0; i < n; ++i) {
    model.centers[i] = std::exp(-model.alpha_s * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  for (int i = 0; i + 1 < n; ++i) {
    const double spacing = model.centers[i] - model.centers[i + 1];
    model.widths[i] = 1.0 / (2.0 * std::pow(0.75 * spacing, 2));
  }
  model.widths[n - 1] = model.widths[n - 2];
}

Eigen::VectorXd basis_activations(const DmpModel& model, double s) {
  Eigen::VectorXd psi(model.n_basis);
  for (int i = 0; i < model.n_basis; ++i) {
    const double d = s - model.centers[i];
    psi[i] = std::exp(-model.widths[i] * d * d);
  }
  return psi;
}

// Shared fit over a 3-channel displacement signal that starts at zero.
DmpModel fit_channels(const std::vector<Eigen::Vector3d>& signal, double dt,
                      const DmpParams& params, DmpChannel channel) {
  const int T = static_cast<int>(signal.size());
  if (T < 3) throw ValidationError("dmp fit needs at least 3 samples");
  if (!(dt > 0.0)) throw ValidationError("dmp fit needs dt > 0");
  if (params.n_basis < 2) throw ValidationError("dmp needs at least 2 basis functions");
  if (!(params.alpha_z > 0.0) || !(params.alpha_s > 0.0)) {
    throw ValidationError("dmp gains must be positive");
  }

  DmpModel model;
  model.channel = channel;
  model.alpha_z = params.alpha_z;
  model.beta_z = params.alpha_z / 4.0;
  model.alpha_s = params.alpha_s;
  model.tau = static_cast<double>(T - 1) * dt;
  model.n_basis = params.n_basis;
  init_basis(model);
  model.goal = signal.back();

  // Demo derivatives: central differences inside, one-sided at the ends for
  // velocity, nearest-interior copy for acceleration.
  std::vector<Eigen::Vector3d> vel(signal.size()), acc(signal.size());
  for (int t = 1; t + 1 < T; ++t) {
    vel[t] = (signal[t + 1] - signal[t - 1]) / (2.0 * dt);
    acc[t] = (signal[t + 1] - 2.0 * signal[t] + signal[t - 1]) / (dt * dt);
  }
  vel[0] = (signal[1] - signal[0]) / dt;
  vel[T - 1] = (signal[T - 1] - signal[T - 2]) / dt;
  acc[0] = acc[1];
  acc[T - 1] = acc[T - 2];

  const Eigen::VectorXd s = phase_sequence(T, dt, model.alpha_s, model.tau);

  // Regressor column i at time t: psi_i(s_t)/sum(psi(s_t)) * s_t; the goal
  // amplitude is folded out and divided back per axis.
  Eigen::MatrixXd design(T, model.n_basis);
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd psi = basis_activations(model, s[t]);
    const double denom = psi.sum();
    if (denom > 0.0) {
      design.row(t) = (psi / denom * s[t]).transpose();
    } else {
      design.row(t).setZero();
    }
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);

  model.weights = Eigen::MatrixXd::Zero(model.n_basis, 3);
  Eigen::VectorXd target(T);
  for (int axis = 0; axis < 3; ++axis) {
    const double g = model.goal[axis];
    if (std::abs(g) < kDegenerateGoal) {
      model.degenerate_axis[static_cast<std::size_t>(axis)] = true;
      continue;
    }
    for (int t = 0; t < T; ++t) {
      target[t] = model.tau * model.tau * acc[t][axis] -
                  model.alpha_z * (model.beta_z * (g - signal[static_cast<std::size_t>(t)][axis]) -
                                   model.tau * vel[static_cast<std::size_t>(t)][axis]);
    }
    model.weights.col(axis) = qr.solve(target) / g;
  }
  return model;
}

// One semi-implicit Euler rollout of the transformation system; the phase
// advances by its exact exponential decay.
std::vector<Eigen::Vector3d> roll(const DmpModel& model, const Eigen::Vector3d& goal,
                                  int steps, double dt) {
  if (steps < 1) throw ValidationError("rollout needs at least 1 step");
  if (!(dt > 0.0)) throw ValidationError("rollout needs dt > 0");
  std::vector<Eigen::Vector3d> out;
  out.reserve(static_cast<std::size_t>(steps));
  Eigen::Vector3d y = Eigen::Vector3d::Zero();
  Eigen::Vector3d z = Eigen::Vector3d::Zero();  // z = tau * dy/dt
  double s = 1.0;
  const double decay = std::exp(-model.alpha_s * dt / model.tau);
  for (int t = 0; t < steps; ++t) {
    out.push_back(y);
    const Eigen::Vector3d f = forcing_term(model, s, goal);
    z += dt * (model.alpha_z * (model.beta_z * (goal - y) - z) + f) / model.tau;
    y += dt * z / model.tau;
    s *= decay;
  }
  return out;
}

}  // namespace

void PoseTrajectory::validate() const {
  if (positions.empty()) throw ValidationError("pose trajectory is empty");
  if (positions.size() != orientations.size()) {
    throw ValidationError("pose trajectory positions/orientations length mismatch");
  }
  if (!(dt > 0.0)) throw ValidationError("pose trajectory dt must be positive");
  for (const auto& p : positions) {
    if (!p.allFinite()) throw ValidationError("pose trajectory has non-finite positions");
  }
  for (const auto& q : orientations) {
    if (std::abs(q.norm() - 1.0) > 1e-9) {
      throw ValidationError("pose trajectory orientation is not unit-norm");
    }
  }
}

PoseTrajectory to_local(const PoseTrajectory& pose_world, const Frame6& frame) {
  frame.validate();
  const Eigen::Matrix3d rt = frame.rotation.transpose();
  const Eigen::Quaterniond rq_inv = Eigen::Quaterniond(frame.rotation).conjugate();
  PoseTrajectory out;
  out.dt = pose_world.dt;
  out.frame = frame;
  out.positions.reserve(pose_world.positions.size());
  out.orientations.reserve(pose_world.orientations.size());
  for (std::size_t i = 0; i < pose_world.positions.size(); ++i) {
    out.positions.push_back(rt * (pose_world.positions[i] - frame.origin));
    out.orientations.push_back((rq_inv * pose_world.orientations[i]).normalized());
  }
  return out;
}

PoseTrajectory to_world(const PoseTrajectory& pose_local, const Frame6& frame) {
  frame.validate();
  const Eigen::Quaterniond rq(frame.rotation);
  PoseTrajectory out;
  out.dt = pose_local.dt;
  out.frame = Frame6{};
  out.positions.reserve(pose_local.positions.size());
  out.orientations.reserve(pose_local.orientations.size());
  for (std::size_t i = 0; i < pose_local.positions.size(); ++i) {
    out.positions.push_back(frame.rotation * pose_local.positions[i] + frame.origin);
    out.orientations.push_back((rq * pose_local.orientations[i]).normalized());
  }
  return out;
}

RelativeMotion relative_motion(const PoseTrajectory& local) {
  local.validate();
  if (local.length() < 2) throw ValidationError("relative motion needs at least 2 samples");
  RelativeMotion rel;
  rel.dx.reserve(local.positions.size());
  rel.dq.reserve(local.orientations.size());
  const Eigen::Vector3d x0 = local.positions.front();
  const Eigen::Quaterniond q0_inv = local.orientations.front().conjugate();
  rel.dx.push_back(Eigen::Vector3d::Zero());
  rel.dq.push_back(Eigen::Quaterniond::Identity());
  for (std::size_t t = 1; t < local.positions.size(); ++t) {
    rel.dx.push_back(local.positions[t] - x0);
    rel.dq.push_back((local.orientations[t] * q0_inv).normalized());
  }
  return rel;
}

void DmpModel::validate() const {
  if (!(tau > 0.0)) throw ValidationError("dmp tau must be positive");
  if (std::abs(beta_z - alpha_z / 4.0) > 1e-12 * alpha_z) {
    throw ValidationError("dmp requires beta_z = alpha_z / 4");
  }
  if (centers.size() != n_basis || widths.size() != n_basis) {
    throw ValidationError("dmp basis arrays do not match n_basis");
  }
  for (int i = 0; i < n_basis; ++i) {
    if (!(centers[i] > 0.0 && centers[i] <= 1.0)) {
      throw ValidationError("dmp centers must lie in (0, 1]");
    }
    if (i > 0 && !(centers[i] < centers[i - 1])) {
      throw ValidationError("dmp centers must be strictly decreasing");
    }
  }
}

DmpModel fit_position_dmp(const std::vector<Eigen::Vector3d>& dx, double dt,
                          const DmpParams& params) {
  return fit_channels(dx, dt, params, DmpChannel::position);
}

DmpModel fit_quaternion_dmp(const std::vector<Eigen::Quaterniond>& dq, double dt,
                            const DmpParams& params) {
  const std::size_t T = dq.size();
  if (T < 3) throw ValidationError("dmp fit needs at least 3 samples");

  // Rotation vectors with continuity correction: each sample picks the
  // 2*pi*k branch closest to its predecessor.
  std::vector<Eigen::Vector3d> r(T);
  r[0] = rotation_vector(dq[0]);
  for (std::size_t t = 1; t < T; ++t) {
    const double dot = std::min(1.0, std::abs(dq[t - 1].dot(dq[t])));
    const double increment = 2.0 * std::acos(dot);
    if (increment > kPi - 1e-9) {
      throw AngleWrap("successive rotations jump by ~pi; continuity is ambiguous");
    }
    const Eigen::Vector3d canonical = rotation_vector(dq[t]);
    const double angle = canonical.norm();
    Eigen::Vector3d axis;
    if (angle > 1e-12) {
      axis = canonical / angle;
    } else if (r[t - 1].norm() > 1e-12) {
      axis = r[t - 1].normalized();
    } else {
      axis = Eigen::Vector3d::Zero();
    }
    const double projected = axis.dot(r[t - 1]);
    const double k = std::round((projected - angle) / (2.0 * kPi));
    Eigen::Vector3d best = canonical;
    double best_dist = (canonical - r[t - 1]).norm();
    for (double cand_k : {k - 1.0, k, k + 1.0}) {
      const Eigen::Vector3d cand = (angle + 2.0 * kPi * cand_k) * axis;
      const double dist = (cand - r[t - 1]).norm();
      if (dist < best_dist) {
        best = cand;
        best_dist = dist;
      }
    }
    r[t] = best;
  }

  return fit_channels(r, dt, params, DmpChannel::orientation);
}

Eigen::Vector3d deploy_goal(const DmpModel& model, const Eigen::Vector3d& x0_new,
                            const Eigen::Vector3d& p_star, const Eigen::Vector3d& x0_demo) {
  const double anchor = (p_star - x0_demo).norm();
  if (anchor <= 1e-9) throw ValidationError("demo anchor distance is zero");
  return model.goal * ((p_star - x0_new).norm() / anchor);
}

std::vector<Eigen::Vector3d> rollout_position(const DmpModel& model,
                                              const Eigen::Vector3d& x0_new,
                                              const Eigen::Vector3d& p_star,
                                              const Eigen::Vector3d& x0_demo,
                                              int steps, double dt) {
  const double anchor = (p_star - x0_demo).norm();
  return rollout_position_anchored(model, x0_new, p_star, anchor, steps, dt);
}

std::vector<Eigen::Vector3d> rollout_position_anchored(const DmpModel& model,
                                                       const Eigen::Vector3d& x0_new,
                                                       const Eigen::Vector3d& p_star,
                                                       double anchor_distance,
                                                       int steps, double dt) {
  if (anchor_distance <= 1e-9) throw ValidationError("demo anchor distance is zero");
  const Eigen::Vector3d goal = model.goal * ((p_star - x0_new).norm() / anchor_distance);
  std::vector<Eigen::Vector3d> ys = roll(model, goal, steps, dt);
  for (auto& y : ys) y += x0_new;
  return ys;
}

std::vector<Eigen::Quaterniond> rollout_quaternion(const DmpModel& model,
                                                   const Eigen::Quaterniond& q0_new,
                                                   int steps, double dt) {
  if (std::abs(q0_new.norm() - 1.0) > 1e-6) {
    throw ValidationError("rollout start quaternion must be unit-norm");
  }
  const std::vector<Eigen::Vector3d> rs = roll(model, model.goal, steps, dt);
  std::vector<Eigen::Quaterniond> out;
  out.reserve(rs.size());
  for (const auto& r : rs) {
    out.push_back((quat_from_rotation_vector(r) * q0_new).normalized());
  }
  return out;
}

Eigen::Vector3d forcing_term(const DmpModel& model, double s, const Eigen::Vector3d& goal) {
  const Eigen::VectorXd psi = basis_activations(model, s);
  const double denom = psi.sum();
  if (!(denom > 0.0)) return Eigen::Vector3d::Zero();
  Eigen::Vector3d f;
  for (int axis = 0; axis < 3; ++axis) {
    f[axis] = psi.dot(model.weights.col(axis)) / denom * s * goal[axis];
  }
  return f;
}

Eigen::Vector3d rotation_vector(const Eigen::Quaterniond& q) {
  Eigen::Quaterniond qn = q.normalized();
  if (qn.w() < 0.0) qn.coeffs() = -qn.coeffs();
  const double sin_half = qn.vec().norm();
  if (sin_half < 1e-12) return 2.0 * qn.vec();
  const double angle = 2.0 * std::atan2(sin_half, qn.w());
  return angle * (qn.vec() / sin_half);
}

Eigen::Quaterniond quat_from_rotation_vector(const Eigen::Vector3d& r) {
  const double angle = r.norm();
  if (angle < 1e-12) {
    Eigen::Quaterniond q(1.0, r[0] / 2.0, r[1] / 2.0, r[2] / 2.0);
    return q.normalized();
  }
  const Eigen::Vector3d axis = r / angle;
  return Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis));
}

namespace {

detail::json model_to_json(const DmpModel& model) {
  using detail::json;
  return json{{"channel", model.channel == DmpChannel::position ? "position" : "orientation"},
              {"alpha_z", model.alpha_z},
              {"beta_z", model.beta_z},
              {"alpha_s", model.alpha_s},
              {"tau", model.tau},
              {"n_basis", model.n_basis},
              {"centers", detail::to_json_vec(model.centers)},
              {"widths", detail::to_json_vec(model.widths)},
              {"weights", detail::to_json_rows(model.weights)},
              {"goal", json::array({model.goal[0], model.goal[1], model.goal[2]})},
              {"anchor_distance", model.anchor_distance},
              {"degenerate_axes", json::array({model.degenerate_axis[0], model.degenerate_axis[1],
                                               model.degenerate_axis[2]})}};
}

DmpModel model_from_json(const detail::json& j) {
  DmpModel model;
  const std::string channel = j.value("channel", "position");
  model.channel = channel == "orientation" ? DmpChannel::orientation : DmpChannel::position;
  model.alpha_z = j.at("alpha_z").get<double>();
  model.beta_z = j.at("beta_z").get<double>();
  model.alpha_s = j.at("alpha_s").get<double>();
  model.tau = j.at("tau").get<double>();
  model.n_basis = j.at("n_basis").get<int>();
  model.centers = detail::vector_from_json(j.at("centers"), "centers");
  model.widths = detail::vector_from_json(j.at("widths"), "widths");
  model.weights = detail::matrix_from_json(j.at("weights"), "weights");
  const Eigen::VectorXd g = detail::vector_from_json(j.at("goal"), "goal");
  if (g.size() != 3) throw ParseError("dmp goal must have 3 components");
  model.goal = g;
  model.anchor_distance = j.value("anchor_distance", 0.0);
  if (j.contains("degenerate_axes")) {
    const auto& d = j.at("degenerate_axes");
    for (int i = 0; i < 3; ++i) model.degenerate_axis[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i)].get<bool>();
  }
  model.validate();
  return model;
}

}  // namespace

void save_model(const std::filesystem::path& path, const DmpModel& model) {
  detail::write_json_file(path, model_to_json(model));
}

DmpModel load_model(const std::filesystem::path& path) {
  return model_from_json(detail::read_json_file(path));
}

void save_model_pair(const std::filesystem::path& path, const DmpPair& pair) {
  detail::write_json_file(path, detail::json{{"position", model_to_json(pair.position)},
                                             {"orientation", model_to_json(pair.orientation)}});
}

DmpPair load_model_pair(const std::filesystem::path& path) {
  const detail::json j = detail::read_json_file(path);
  if (!j.contains("position") || !j.contains("orientation")) {
    throw ParseError(path.string() + ": model pair needs position and orientation entries");
  }
  return DmpPair{model_from_json(j.at("position")), model_from_json(j.at("orientation"))};
}

void save_pose_trajectory(const std::filesystem::path& path, const PoseTrajectory& pose) {
  using detail::json;
  pose.validate();
  json positions = json::array();
  json orientations = json::array();
  for (const auto& x : pose.positions) positions.push_back(json::array({x[0], x[1], x[2]}));
  for (const auto& q : pose.orientations) orientations.push_back(detail::to_json_quat(q));
  const json j{{"dt", pose.dt},
               {"positions", std::move(positions)},
               {"orientations", std::move(orientations)},
               {"frame", detail::to_json_frame(pose.frame)}};
  detail::write_json_file(path, j);
}

PoseTrajectory load_pose_trajectory(const std::filesystem::path& path) {
  using detail::json;
  const json j = detail::read_json_file(path);
  PoseTrajectory pose;
  pose.dt = j.value("dt", 0.05);
  const Eigen::MatrixXd pts = detail::matrix_from_json(j.at("positions"), "positions");
  if (pts.cols() != 3) throw ParseError("pose trajectory positions must be 3D");
  for (Eigen::Index r = 0; r < pts.rows(); ++r) pose.positions.emplace_back(pts.row(r).transpose());
  if (j.contains("orientations")) {
    for (const auto& q : j.at("orientations")) {
      pose.orientations.push_back(detail::quat_from_json(q, "orientation"));
    }
  } else {
    pose.orientations.assign(pose.positions.size(), Eigen::Quaterniond::Identity());
  }
  if (j.contains("frame")) pose.frame = detail::frame_from_json(j.at("frame"));
  pose.validate();
  return pose;
}

}  // namespace tref6::dmp
