#include "tref6/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json_util.hpp"

namespace tref6::bench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream-derivation tags; every trial owns disjoint substreams of the base
// seed so sweeps are reproducible and order-independent.
constexpr std::uint64_t kEpisodeTag = 0xE1;
constexpr std::uint64_t kInferTag = 0x1F;
constexpr std::uint64_t kTruth2Tag = 0x72;

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::min(resolve_jobs(jobs), n);
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Rounds to 6 significant digits so serialized reports are byte-stable.
double round6(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

void finalize_cell(BenchCell& cell) {
  double sum = 0.0;
  int ok = 0;
  for (double m : cell.medes) {
    if (std::isnan(m)) {
      ++cell.failures;
    } else {
      sum += m;
      ++ok;
    }
  }
  if (ok == 0) {
    cell.mean = kNaN;
    cell.stddev = kNaN;
    return;
  }
  cell.mean = sum / ok;
  double sq = 0.0;
  for (double m : cell.medes) {
    if (!std::isnan(m)) sq += (m - cell.mean) * (m - cell.mean);
  }
  cell.stddev = ok > 1 ? std::sqrt(sq / (ok - 1)) : 0.0;
}

scoring::ScoreFunction score_for(Method method, double epsilon) {
  scoring::ScoreFunction score;
  score.epsilon = epsilon;
  switch (method) {
    case Method::dcs:
    case Method::dcs_random_init:
      score.kind = scoring::ScoreKind::directional_consistency;
      break;
    case Method::cosine:
      score.kind = scoring::ScoreKind::cosine_similarity;
      break;
    case Method::quadratic:
      score.kind = scoring::ScoreKind::quadratic_residual;
      break;
    case Method::triangulate:
      break;  // unused
  }
  return score;
}

// Runs one inference method on a prepared trajectory; optimizer top_k is
// clamped to the trajectory length so short prefixes stay valid.
InfluencePoint run_method(Method method, const Trajectory& traj,
                          const inference::OptimizerConfig& base_cfg, double epsilon,
                          const RngSpec& stream) {
  if (method == Method::triangulate) return inference::triangulate(traj);
  inference::OptimizerConfig cfg = base_cfg;
  cfg.top_k = std::min<int>(cfg.top_k, static_cast<int>(traj.length()));
  cfg.init_mode = method == Method::dcs_random_init ? inference::InitMode::random
                                                    : inference::InitMode::structured;
  return inference::optimize(score_for(method, epsilon), traj, cfg, stream).point;
}

std::string join_doubles(const std::vector<double>& vs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out << ',';
    out << format_double(vs[i]);
  }
  return out.str();
}

std::string join_ints(const std::vector<int>& vs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out << ',';
    out << vs[i];
  }
  return out.str();
}

std::map<std::string, std::string> common_config_echo(int dim, int seeds,
                                                      sim::AccelMode mode,
                                                      const sim::SimConfig& sc,
                                                      const inference::OptimizerConfig& oc,
                                                      std::uint64_t base_seed) {
  return {
      {"dim", std::to_string(dim)},
      {"seeds", std::to_string(seeds)},
      {"accel_mode", mode == sim::AccelMode::recorded ? "recorded" : "differentiated"},
      {"sim_steps", std::to_string(sc.steps)},
      {"sim_dt", format_double(sc.dt)},
      {"sim_damping", format_double(sc.damping)},
      {"opt_steps", std::to_string(oc.steps)},
      {"opt_learning_rate", format_double(oc.learning_rate)},
      {"opt_top_k", std::to_string(oc.top_k)},
      {"opt_init_sigma", format_double(oc.init_sigma)},
      {"base_seed", std::to_string(base_seed)},
  };
}

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

}  // namespace

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::dcs, Method::dcs_random_init,
                                           Method::triangulate, Method::cosine,
                                           Method::quadratic};
  return methods;
}

std::string method_name(Method method) {
  switch (method) {
    case Method::dcs: return "dcs";
    case Method::dcs_random_init: return "dcs_random_init";
    case Method::triangulate: return "triangulate";
    case Method::cosine: return "cosine";
    case Method::quadratic: return "quadratic";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

const BenchCell* BenchReport::find(const std::string& method, double noise,
                                   const std::string& key) const {
  for (const auto& cell : cells) {
    if (cell.method == method && cell.noise == noise && cell.key == key) return &cell;
  }
  return nullptr;
}

BenchReport run_mede_benchmark(const MedeBenchConfig& cfg) {
  if (cfg.seeds < 1) throw ValidationError("benchmark needs at least 1 seed");
  if (cfg.methods.empty() || cfg.noise_levels.empty()) {
    throw ValidationError("benchmark needs non-empty method and noise lists");
  }
  Stopwatch watch;

  BenchReport report;
  report.kind = "mede_benchmark";
  report.config = common_config_echo(cfg.dim, cfg.seeds, cfg.accel_mode, cfg.sim,
                                     cfg.optimizer, cfg.base_seed);
  report.config["noise_levels"] = join_doubles(cfg.noise_levels);
  {
    std::ostringstream names;
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
      if (i) names << ',';
      names << method_name(cfg.methods[i]);
    }
    report.config["methods"] = names.str();
  }

  const int n_methods = static_cast<int>(cfg.methods.size());
  const int n_noise = static_cast<int>(cfg.noise_levels.size());
  const int n_trials = n_methods * n_noise * cfg.seeds;
  std::vector<double> results(static_cast<std::size_t>(n_trials), kNaN);
  const RngSpec base{cfg.base_seed, 0};

  parallel_for(n_trials, cfg.jobs, [&](int idx) {
    const int seed = idx % cfg.seeds;
    const int noise_idx = (idx / cfg.seeds) % n_noise;
    const int method_idx = idx / (cfg.seeds * n_noise);
    const Method method = cfg.methods[static_cast<std::size_t>(method_idx)];
    const std::uint64_t method_stream = static_cast<std::uint64_t>(method);

    sim::SimConfig sc = cfg.sim;
    sc.dim = cfg.dim;
    sc.noise_level = cfg.noise_levels[static_cast<std::size_t>(noise_idx)];

    try {
      // The episode stream is keyed by (noise, seed) only, so every method
      // sees the same episode and the comparison is paired.
      const RngSpec episode_stream =
          base.derive(kEpisodeTag).derive(static_cast<std::uint64_t>(noise_idx)).derive(static_cast<std::uint64_t>(seed));
      const sim::SimEpisode episode = sim::simulate(sc, episode_stream);
      const Trajectory traj = sim::accelerations_for_inference(episode, cfg.accel_mode);
      const RngSpec infer_stream = base.derive(kInferTag)
                                       .derive(method_stream)
                                       .derive(static_cast<std::uint64_t>(noise_idx))
                                       .derive(static_cast<std::uint64_t>(seed));
      const InfluencePoint point = run_method(method, traj, cfg.optimizer, cfg.score_epsilon,
                                              infer_stream);
      results[static_cast<std::size_t>(idx)] = mede(point, episode.truth);
    } catch (const Error&) {
      // Per-trial failure: excluded from the mean, counted in the report.
    }
  });

  for (int mi = 0; mi < n_methods; ++mi) {
    for (int ni = 0; ni < n_noise; ++ni) {
      BenchCell cell;
      cell.method = method_name(cfg.methods[static_cast<std::size_t>(mi)]);
      cell.noise = cfg.noise_levels[static_cast<std::size_t>(ni)];
      for (int seed = 0; seed < cfg.seeds; ++seed) {
        cell.seeds.push_back(static_cast<std::uint64_t>(seed));
        cell.medes.push_back(results[static_cast<std::size_t>((mi * n_noise + ni) * cfg.seeds + seed)]);
      }
      finalize_cell(cell);
      report.cells.push_back(std::move(cell));
    }
  }
  report.wall_seconds = watch.seconds();
  return report;
}

BenchReport run_partial_benchmark(const PartialBenchConfig& cfg) {
  if (cfg.seeds < 1) throw ValidationError("benchmark needs at least 1 seed");
  if (cfg.noise_levels.empty() || cfg.prefix_lens.empty()) {
    throw ValidationError("benchmark needs non-empty noise and prefix lists");
  }
  const int min_prefix = cfg.accel_mode == sim::AccelMode::recorded ? 2 : 3;
  for (int prefix : cfg.prefix_lens) {
    if (prefix < min_prefix || prefix > cfg.sim.steps) {
      throw ValidationError("prefix " + std::to_string(prefix) + " outside [" +
                            std::to_string(min_prefix) + ", steps]");
    }
  }
  Stopwatch watch;

  BenchReport report;
  report.kind = "partial_benchmark";
  report.config = common_config_echo(cfg.dim, cfg.seeds, cfg.accel_mode, cfg.sim,
                                     cfg.optimizer, cfg.base_seed);
  report.config["noise_levels"] = join_doubles(cfg.noise_levels);
  report.config["prefix_lens"] = join_ints(cfg.prefix_lens);

  const int n_noise = static_cast<int>(cfg.noise_levels.size());
  const int n_prefix = static_cast<int>(cfg.prefix_lens.size());
  const int n_trials = n_noise * n_prefix * cfg.seeds;
  std::vector<double> results(static_cast<std::size_t>(n_trials), kNaN);
  const RngSpec base{cfg.base_seed, 0};
  const scoring::ScoreFunction score = score_for(Method::dcs, cfg.score_epsilon);

  parallel_for(n_trials, cfg.jobs, [&](int idx) {
    const int seed = idx % cfg.seeds;
    const int prefix_idx = (idx / cfg.seeds) % n_prefix;
    const int noise_idx = idx / (cfg.seeds * n_prefix);
    const int prefix = cfg.prefix_lens[static_cast<std::size_t>(prefix_idx)];

    sim::SimConfig sc = cfg.sim;
    sc.dim = cfg.dim;
    sc.noise_level = cfg.noise_levels[static_cast<std::size_t>(noise_idx)];

    try {
      const RngSpec episode_stream =
          base.derive(kEpisodeTag).derive(static_cast<std::uint64_t>(noise_idx)).derive(static_cast<std::uint64_t>(seed));
      const sim::SimEpisode episode = sim::simulate(sc, episode_stream);
      const Trajectory traj = sim::accelerations_for_inference(episode, cfg.accel_mode);
      // No prefix component in the stream: the prefix == steps column
      // reproduces the full-trajectory benchmark bit-exactly.
      const RngSpec infer_stream = base.derive(kInferTag)
                                       .derive(static_cast<std::uint64_t>(Method::dcs))
                                       .derive(static_cast<std::uint64_t>(noise_idx))
                                       .derive(static_cast<std::uint64_t>(seed));
      inference::OptimizerConfig oc = cfg.optimizer;
      oc.top_k = std::min(oc.top_k, prefix);
      const InferenceResult res = inference::infer_partial(score, traj, prefix, oc, infer_stream);
      results[static_cast<std::size_t>(idx)] = mede(res.point, episode.truth);
    } catch (const Error&) {
    }
  });

  for (int ni = 0; ni < n_noise; ++ni) {
    for (int pi = 0; pi < n_prefix; ++pi) {
      BenchCell cell;
      cell.method = "dcs";
      cell.noise = cfg.noise_levels[static_cast<std::size_t>(ni)];
      cell.key = std::to_string(cfg.prefix_lens[static_cast<std::size_t>(pi)]);
      for (int seed = 0; seed < cfg.seeds; ++seed) {
        cell.seeds.push_back(static_cast<std::uint64_t>(seed));
        cell.medes.push_back(results[static_cast<std::size_t>((ni * n_prefix + pi) * cfg.seeds + seed)]);
      }
      finalize_cell(cell);
      report.cells.push_back(std::move(cell));
    }
  }
  report.wall_seconds = watch.seconds();
  return report;
}

BenchReport run_sequential_benchmark(const SequentialBenchConfig& cfg) {
  if (cfg.seeds < 1) throw ValidationError("benchmark needs at least 1 seed");
  if (cfg.noise_levels.empty() || cfg.switch_ratios.empty()) {
    throw ValidationError("benchmark needs non-empty noise and ratio lists");
  }
  for (double ratio : cfg.switch_ratios) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("switch ratios must be in (0, 1)");
  }
  Stopwatch watch;

  BenchReport report;
  report.kind = "sequential_benchmark";
  report.config = common_config_echo(cfg.dim, cfg.seeds, cfg.accel_mode, cfg.sim,
                                     cfg.optimizer, cfg.base_seed);
  report.config["noise_levels"] = join_doubles(cfg.noise_levels);
  report.config["switch_ratios"] = join_doubles(cfg.switch_ratios);

  const int n_noise = static_cast<int>(cfg.noise_levels.size());
  const int n_ratio = static_cast<int>(cfg.switch_ratios.size());
  const int n_trials = n_noise * n_ratio * cfg.seeds;
  struct SeqOutcome {
    double p1 = kNaN, p2 = kNaN, overall = kNaN;
  };
  std::vector<SeqOutcome> results(static_cast<std::size_t>(n_trials));
  const RngSpec base{cfg.base_seed, 0};
  const scoring::ScoreFunction score = score_for(Method::dcs, cfg.score_epsilon);

  parallel_for(n_trials, cfg.jobs, [&](int idx) {
    const int seed = idx % cfg.seeds;
    const int ratio_idx = (idx / cfg.seeds) % n_ratio;
    const int noise_idx = idx / (cfg.seeds * n_ratio);
    const double ratio = cfg.switch_ratios[static_cast<std::size_t>(ratio_idx)];

    sim::SimConfig sc = cfg.sim;
    sc.dim = cfg.dim;
    sc.noise_level = cfg.noise_levels[static_cast<std::size_t>(noise_idx)];
    const int switch_step =
        std::clamp(static_cast<int>(std::lround(ratio * sc.steps)), 2, sc.steps - 2);
    sc.switch_step = switch_step;

    try {
      const RngSpec truth2_stream = base.derive(kTruth2Tag)
                                        .derive(static_cast<std::uint64_t>(noise_idx))
                                        .derive(static_cast<std::uint64_t>(ratio_idx))
                                        .derive(static_cast<std::uint64_t>(seed));
      Rng truth2_gen(truth2_stream);
      sc.second_point = truth2_gen.uniform_vec(cfg.dim, sc.p_range[0], sc.p_range[1]);

      const RngSpec episode_stream = base.derive(kEpisodeTag)
                                         .derive(static_cast<std::uint64_t>(noise_idx))
                                         .derive(static_cast<std::uint64_t>(ratio_idx))
                                         .derive(static_cast<std::uint64_t>(seed));
      const sim::SimEpisode episode = sim::simulate(sc, episode_stream);
      const Trajectory traj = sim::accelerations_for_inference(episode, cfg.accel_mode);
      const RngSpec infer_stream = base.derive(kInferTag)
                                       .derive(static_cast<std::uint64_t>(Method::dcs))
                                       .derive(static_cast<std::uint64_t>(noise_idx))
                                       .derive(static_cast<std::uint64_t>(ratio_idx))
                                       .derive(static_cast<std::uint64_t>(seed));
      inference::OptimizerConfig oc = cfg.optimizer;
      oc.top_k = std::min(oc.top_k, std::min(switch_step, sc.steps - switch_step));
      const inference::SequentialResult res =
          inference::infer_sequential(score, traj, switch_step, oc, infer_stream);
      SeqOutcome out;
      out.p1 = mede(res.first.point, episode.truth);
      out.p2 = mede(res.second.point, *episode.truth2);
      out.overall = 0.5 * (out.p1 + out.p2);
      results[static_cast<std::size_t>(idx)] = out;
    } catch (const Error&) {
    }
  });

  for (int ni = 0; ni < n_noise; ++ni) {
    for (int ri = 0; ri < n_ratio; ++ri) {
      const std::string key = format_double(cfg.switch_ratios[static_cast<std::size_t>(ri)]);
      const double noise = cfg.noise_levels[static_cast<std::size_t>(ni)];
      BenchCell p1, p2, overall;
      p1.method = "dcs_p1";
      p2.method = "dcs_p2";
      overall.method = "dcs_overall";
      for (BenchCell* cell : {&p1, &p2, &overall}) {
        cell->noise = noise;
        cell->key = key;
      }
      for (int seed = 0; seed < cfg.seeds; ++seed) {
        const SeqOutcome& out = results[static_cast<std::size_t>((ni * n_ratio + ri) * cfg.seeds + seed)];
        for (BenchCell* cell : {&p1, &p2, &overall}) {
          cell->seeds.push_back(static_cast<std::uint64_t>(seed));
        }
        p1.medes.push_back(out.p1);
        p2.medes.push_back(out.p2);
        overall.medes.push_back(out.overall);
      }
      for (BenchCell* cell : {&p1, &p2, &overall}) finalize_cell(*cell);
      report.cells.push_back(std::move(p1));
      report.cells.push_back(std::move(p2));
      report.cells.push_back(std::move(overall));
    }
  }
  report.wall_seconds = watch.seconds();
  return report;
}

LandscapeResult score_landscape(const Trajectory& traj, const scoring::ScoreFunction& score,
                                const Eigen::Vector2d& grid_min, const Eigen::Vector2d& grid_max,
                                const Eigen::Vector2i& resolution,
                                std::optional<double> z_slice) {
  if (resolution[0] < 1 || resolution[1] < 1) {
    throw ValidationError("landscape resolution must be at least 1 per axis");
  }
  if (grid_min[0] > grid_max[0] || grid_min[1] > grid_max[1]) {
    throw ValidationError("landscape grid bounds are inverted");
  }
  if (traj.dim == 3 && !z_slice) {
    throw ValidationError("3D trajectories need a z slice value for the landscape");
  }

  auto linspace = [](double lo, double hi, int n) {
    Eigen::VectorXd v(n);
    if (n == 1) {
      v[0] = lo;
    } else {
      for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    }
    return v;
  };

  LandscapeResult result;
  result.xs = linspace(grid_min[0], grid_max[0], resolution[0]);
  result.ys = linspace(grid_min[1], grid_max[1], resolution[1]);
  result.scores.resize(resolution[1], resolution[0]);

  InfluencePoint p(traj.dim);
  if (traj.dim == 3) p[2] = *z_slice;
  for (int iy = 0; iy < resolution[1]; ++iy) {
    for (int ix = 0; ix < resolution[0]; ++ix) {
      p[0] = result.xs[ix];
      p[1] = result.ys[iy];
      result.scores(iy, ix) = scoring::evaluate(score, traj, p);
    }
  }
  return result;
}

void write_landscape_csv(const std::filesystem::path& path, const LandscapeResult& result) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "px,py,score\n";
  char buf[96];
  for (Eigen::Index iy = 0; iy < result.ys.size(); ++iy) {
    for (Eigen::Index ix = 0; ix < result.xs.size(); ++ix) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", result.xs[ix], result.ys[iy],
                    result.scores(iy, ix));
      out << buf;
    }
  }
}

void write_report_json(const std::filesystem::path& path, const BenchReport& report) {
  using detail::json;
  json cells = json::array();
  for (const auto& cell : report.cells) {
    json medes = json::array();
    for (double m : cell.medes) {
      if (std::isnan(m)) {
        medes.push_back(nullptr);
      } else {
        medes.push_back(round6(m));
      }
    }
    json seeds = json::array();
    for (std::uint64_t s : cell.seeds) seeds.push_back(s);
    const int count = static_cast<int>(cell.medes.size()) - cell.failures;
    json jc{{"method", cell.method},
            {"noise", cell.noise},
            {"key", cell.key},
            {"count", count},
            {"failures", cell.failures},
            {"seeds", std::move(seeds)},
            {"medes", std::move(medes)}};
    if (std::isnan(cell.mean)) {
      jc["mean"] = nullptr;
      jc["std"] = nullptr;
    } else {
      jc["mean"] = round6(cell.mean);
      jc["std"] = round6(cell.stddev);
    }
    cells.push_back(std::move(jc));
  }
  const json j{{"kind", report.kind}, {"config", report.config}, {"cells", std::move(cells)}};
  detail::write_json_file(path, j);
}

void write_report_csv(const std::filesystem::path& path, const BenchReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "method,noise,key,seed,mede,status\n";
  char buf[64];
  for (const auto& cell : report.cells) {
    for (std::size_t i = 0; i < cell.medes.size(); ++i) {
      out << cell.method << ',';
      std::snprintf(buf, sizeof buf, "%g", cell.noise);
      out << buf << ',' << cell.key << ',' << cell.seeds[i] << ',';
      if (std::isnan(cell.medes[i])) {
        out << ",failed\n";
      } else {
        std::snprintf(buf, sizeof buf, "%.6g", cell.medes[i]);
        out << buf << ",ok\n";
      }
    }
  }
}

}  // namespace tref6::bench
