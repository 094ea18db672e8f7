#include "tref6/simulator.hpp"

#include <cmath>
#include <string>

#include "json_util.hpp"

namespace tref6::sim {

void SimConfig::validate() const {
  if (dim != 2 && dim != 3) throw ValidationError("sim dim must be 2 or 3");
  if (steps < 2) throw ValidationError("sim needs at least 2 steps");
  if (!(dt > 0.0)) throw ValidationError("sim dt must be positive");
  if (!(noise_level >= 0.0 && noise_level <= 1.0)) {
    throw ValidationError("noise_level must be in [0, 1]");
  }
  if (v0_range[0] > v0_range[1] || p_range[0] > p_range[1]) {
    throw ValidationError("range lower bound exceeds upper bound");
  }
  if (damping < 0.0) throw ValidationError("damping must be non-negative");
  if (second_point.has_value() != switch_step.has_value()) {
    throw ValidationError("second_point and switch_step must be given together");
  }
  if (second_point) {
    if (second_point->size() != dim) throw ValidationError("second_point dimension mismatch");
    if (!second_point->allFinite()) throw ValidationError("second_point must be finite");
    if (*switch_step < 2 || *switch_step > steps - 2) {
      throw ValidationError("switch_step must be in [2, steps-2]");
    }
  }
}

SimEpisode simulate(const SimConfig& cfg, const RngSpec& rng) {
  cfg.validate();
  Rng gen(rng);
  const int dim = cfg.dim;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd v = gen.uniform_vec(dim, cfg.v0_range[0], cfg.v0_range[1]);
  const Eigen::VectorXd truth = gen.uniform_vec(dim, cfg.p_range[0], cfg.p_range[1]);

  Eigen::MatrixXd positions(cfg.steps, dim);
  Eigen::MatrixXd applied(cfg.steps, dim);

  for (int t = 0; t < cfg.steps; ++t) {
    positions.row(t) = x;

    const bool second_phase = cfg.switch_step && t >= *cfg.switch_step;
    const Eigen::VectorXd& target = second_phase ? *cfg.second_point : truth;

    const Eigen::VectorXd to_target = target - x;
    const double dist = to_target.norm();
    Eigen::VectorXd dir = dist > 1e-12 ? Eigen::VectorXd(to_target / dist)
                                       : Eigen::VectorXd::Zero(dim);

    // Noise draws happen at every step regardless of nu, so episodes with
    // the same seed share initial conditions across noise levels.
    const Eigen::VectorXd dir_noise = gen.normal_vec(dim);
    Eigen::VectorXd noisy_dir = dir + cfg.noise_level * dir_noise;
    const double nn = noisy_dir.norm();
    noisy_dir = nn > 1e-12 ? Eigen::VectorXd(noisy_dir / nn) : dir;

    const double alpha = gen.uniform(0.0, dist);  // diminishing attraction
    const double magnitude = alpha * std::max(0.0, 1.0 + cfg.noise_level * gen.normal());

    const Eigen::VectorXd accel = magnitude * noisy_dir - cfg.damping * v;
    applied.row(t) = accel;

    v += accel * cfg.dt;
    x += v * cfg.dt;
  }

  SimEpisode episode;
  episode.trajectory.dim = dim;
  episode.trajectory.dt = cfg.dt;
  episode.trajectory.positions = positions;
  episode.trajectory.accelerations = applied;
  episode.truth = truth;
  if (cfg.second_point) {
    episode.truth2 = *cfg.second_point;
    episode.switch_step = *cfg.switch_step;
  }
  episode.applied_accelerations = applied;
  episode.config = cfg;
  episode.seed = rng;
  return episode;
}

Trajectory accelerations_for_inference(const SimEpisode& episode, AccelMode mode) {
  Trajectory traj;
  traj.dim = episode.trajectory.dim;
  traj.dt = episode.trajectory.dt;
  traj.positions = episode.trajectory.positions;
  traj.accelerations = mode == AccelMode::recorded
                           ? episode.applied_accelerations
                           : numeric_accelerations(traj.positions, traj.dt);
  return traj;
}

void save_episode(const std::filesystem::path& path, const SimEpisode& episode) {
  using detail::json;
  json j{{"dim", episode.trajectory.dim},
         {"dt", episode.trajectory.dt},
         {"positions", detail::to_json_rows(episode.trajectory.positions)},
         {"accelerations", detail::to_json_rows(episode.trajectory.accelerations)},
         {"truth", detail::to_json_vec(episode.truth)},
         {"noise", episode.config.noise_level},
         {"seed", episode.seed.base_seed},
         {"stream", episode.seed.stream_index},
         {"applied_accelerations", detail::to_json_rows(episode.applied_accelerations)},
         {"damping", episode.config.damping},
         {"v0_range", json::array({episode.config.v0_range[0], episode.config.v0_range[1]})},
         {"p_range", json::array({episode.config.p_range[0], episode.config.p_range[1]})}};
  if (episode.truth2) {
    j["truth2"] = detail::to_json_vec(*episode.truth2);
    j["switch_step"] = *episode.switch_step;
  }
  detail::write_json_file(path, j);
}

SimEpisode load_episode(const std::filesystem::path& path) {
  using detail::json;
  const json j = detail::read_json_file(path);
  for (const char* key : {"positions", "truth", "applied_accelerations"}) {
    if (!j.contains(key)) throw ParseError(path.string() + ": episode is missing " + key);
  }
  SimEpisode episode;
  episode.trajectory.positions = detail::matrix_from_json(j.at("positions"), "positions");
  episode.trajectory.dim = j.contains("dim") ? j.at("dim").get<int>()
                                             : static_cast<int>(episode.trajectory.positions.cols());
  episode.trajectory.dt = j.contains("dt") ? j.at("dt").get<double>() : 0.05;
  episode.applied_accelerations =
      detail::matrix_from_json(j.at("applied_accelerations"), "applied_accelerations");
  episode.trajectory.accelerations =
      j.contains("accelerations") ? detail::matrix_from_json(j.at("accelerations"), "accelerations")
                                  : episode.applied_accelerations;
  episode.trajectory.validate();
  episode.truth = detail::vector_from_json(j.at("truth"), "truth");
  if (j.contains("truth2")) {
    episode.truth2 = detail::vector_from_json(j.at("truth2"), "truth2");
    if (!j.contains("switch_step")) throw ParseError("episode truth2 without switch_step");
    episode.switch_step = j.at("switch_step").get<int>();
  }

  SimConfig cfg;
  cfg.dim = episode.trajectory.dim;
  cfg.steps = static_cast<int>(episode.trajectory.length());
  cfg.dt = episode.trajectory.dt;
  cfg.noise_level = j.contains("noise") ? j.at("noise").get<double>() : 0.0;
  cfg.damping = j.contains("damping") ? j.at("damping").get<double>() : 0.1;
  if (j.contains("v0_range")) {
    const auto r = j.at("v0_range");
    cfg.v0_range = Eigen::Vector2d(r[0].get<double>(), r[1].get<double>());
  }
  if (j.contains("p_range")) {
    const auto r = j.at("p_range");
    cfg.p_range = Eigen::Vector2d(r[0].get<double>(), r[1].get<double>());
  }
  if (episode.truth2) {
    cfg.second_point = *episode.truth2;
    cfg.switch_step = *episode.switch_step;
  }
  episode.config = cfg;

  episode.seed.base_seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0;
  episode.seed.stream_index = j.contains("stream") ? j.at("stream").get<std::uint64_t>() : 0;

  if (episode.applied_accelerations.rows() != episode.trajectory.length() ||
      episode.applied_accelerations.cols() != episode.trajectory.dim) {
    throw ValidationError(path.string() + ": applied_accelerations shape mismatch");
  }
  if (episode.truth.size() != episode.trajectory.dim) {
    throw ValidationError(path.string() + ": truth dimension mismatch");
  }
  return episode;
}

}  // namespace tref6::sim
