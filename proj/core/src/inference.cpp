#include "tref6/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

namespace tref6::inference {

namespace {

void check_config(const OptimizerConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (cfg.steps < 1) throw ValidationError("optimizer needs at least one step");
  if (!(cfg.fd_step > 0.0)) throw ValidationError("fd_step must be positive");
  if (cfg.init_sigma < 0.0) throw ValidationError("init_sigma must be non-negative");
}

InfluencePoint random_init(const Trajectory& traj, Rng& rng) {
  // Uniform over the trajectory's axis-aligned bounding box inflated by 1 m.
  InfluencePoint p(traj.dim);
  for (int c = 0; c < traj.dim; ++c) {
    const double lo = traj.positions.col(c).minCoeff() - 1.0;
    const double hi = traj.positions.col(c).maxCoeff() + 1.0;
    p[c] = rng.uniform(lo, hi);
  }
  return p;
}

}  // namespace

InfluencePoint topk_init(const Trajectory& traj, int k, double sigma, const RngSpec& rng) {
  const Eigen::Index T = traj.length();
  if (k < 1 || k > T) {
    throw ValidationError("topk_init: k must be in [1, T], got " + std::to_string(k));
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(T));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::VectorXd norms(T);
  for (Eigen::Index t = 0; t < T; ++t) norms[t] = traj.accelerations.row(t).norm();
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (norms[a] != norms[b]) return norms[a] > norms[b];
    return a < b;
  });

  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(traj.dim);
  for (int i = 0; i < k; ++i) centroid += traj.positions.row(order[static_cast<std::size_t>(i)]).transpose();
  centroid /= static_cast<double>(k);

  Rng gen(rng);
  return centroid + sigma * gen.normal_vec(traj.dim);
}

InferenceResult optimize(const scoring::ScoreFunction& score, const Trajectory& traj,
                         const OptimizerConfig& cfg, const RngSpec& rng) {
  check_config(cfg);

  InfluencePoint p;
  if (cfg.init_mode == InitMode::structured) {
    p = topk_init(traj, cfg.top_k, cfg.init_sigma, rng);
  } else {
    Rng gen(rng);
    p = random_init(traj, gen);
  }

  InferenceResult result;
  result.init_point = p;
  result.point = p;
  result.score = scoring::evaluate(score, traj, p);

  Eigen::VectorXd m = Eigen::VectorXd::Zero(traj.dim);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(traj.dim);
  int updates = 0;
  bool converged = false;
  bool aborted = false;

  for (int i = 1; i <= cfg.steps; ++i) {
    const Eigen::VectorXd grad = scoring::fd_gradient(score, traj, p, cfg.fd_step);
    if (!grad.allFinite()) {
      aborted = true;
      break;
    }
    if (grad.norm() < cfg.convergence_tol) {
      converged = true;
      break;
    }
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
    v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, i);
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, i);
    const Eigen::VectorXd step =
        cfg.learning_rate * (m / bc1).cwiseQuotient(((v / bc2).cwiseSqrt().array() + cfg.adam_eps).matrix());
    p += step;  // ascent: the score convention is maximize
    ++updates;

    if (!p.allFinite()) {
      aborted = true;
      break;
    }
    const double s = scoring::evaluate(score, traj, p);
    if (!std::isfinite(s)) {
      aborted = true;
      break;
    }
    if (s > result.score) {
      result.score = s;
      result.point = p;
    }
  }

  if (!converged && !aborted) {
    converged = scoring::fd_gradient(score, traj, p, cfg.fd_step).norm() < cfg.convergence_tol;
  }
  result.iterations = updates;
  result.converged = converged && !aborted;
  return result;
}

InfluencePoint triangulate(const Trajectory& traj) {
  const int dim = traj.dim;
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  int usable = 0;
  for (Eigen::Index t = 0; t < traj.length(); ++t) {
    const Eigen::VectorXd a = traj.accelerations.row(t).transpose();
    const double n = a.norm();
    if (n <= 1e-12) continue;
    const Eigen::VectorXd dir = a / n;
    const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(dim, dim) - dir * dir.transpose();
    normal += proj;
    rhs += proj * traj.positions.row(t).transpose();
    ++usable;
  }
  if (usable < 2) {
    throw DegenerateRays("triangulation needs at least 2 samples with nonzero acceleration");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(normal);
  const Eigen::VectorXd& eval = es.eigenvalues();  // ascending
  const double lo = eval[0];
  const double hi = eval[dim - 1];
  if (!(lo > 0.0) || hi / lo > 1e10) {
    throw DegenerateRays("triangulation normal equations are singular or ill-conditioned");
  }
  return es.eigenvectors() *
         (es.eigenvectors().transpose() * rhs).cwiseQuotient(eval);
}

Trajectory slice(const Trajectory& traj, int begin, int len) {
  if (begin < 0 || len < 1 || begin + len > traj.length()) {
    throw ValidationError("trajectory slice out of range");
  }
  Trajectory out;
  out.dim = traj.dim;
  out.dt = traj.dt;
  out.positions = traj.positions.middleRows(begin, len);
  out.accelerations = traj.accelerations.middleRows(begin, len);
  if (!traj.orientations.empty()) {
    out.orientations.assign(traj.orientations.begin() + begin,
                            traj.orientations.begin() + begin + len);
  }
  return out;
}

Trajectory truncate(const Trajectory& traj, int len) { return slice(traj, 0, len); }

InferenceResult infer_partial(const scoring::ScoreFunction& score, const Trajectory& traj,
                              int prefix_len, const OptimizerConfig& cfg, const RngSpec& rng) {
  if (prefix_len < 2 || prefix_len > traj.length()) {
    throw ValidationError("prefix_len must be in [2, T]");
  }
  return optimize(score, truncate(traj, prefix_len), cfg, rng);
}

SequentialResult infer_sequential(const scoring::ScoreFunction& score, const Trajectory& traj,
                                  int switch_step, const OptimizerConfig& cfg,
                                  const RngSpec& rng) {
  const Eigen::Index T = traj.length();
  if (switch_step < 2 || switch_step > T - 2) {
    throw ValidationError("switch_step must be in [2, T-2]");
  }
  SequentialResult out;
  out.first = optimize(score, slice(traj, 0, switch_step), cfg, rng.derive(1));
  out.second = optimize(score, slice(traj, switch_step, static_cast<int>(T) - switch_step),
                        cfg, rng.derive(2));
  return out;
}

}  // namespace tref6::inference
