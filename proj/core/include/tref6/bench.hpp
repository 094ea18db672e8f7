#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tref6/inference.hpp"
#include "tref6/scoring.hpp"
#include "tref6/simulator.hpp"

namespace tref6::bench {

enum class Method { dcs, dcs_random_init, triangulate, cosine, quadratic };

const std::vector<Method>& all_methods();
std::string method_name(Method method);
std::optional<Method> parse_method(const std::string& name);

struct BenchCell {
  std::string method;
  double noise = 0.0;
  std::string key;                      // "", prefix length, or switch ratio
  std::vector<std::uint64_t> seeds;     // ascending, one per trial
  std::vector<double> medes;            // aligned with seeds; NaN marks a failed trial
  int failures = 0;
  double mean = 0.0;                    // over successful trials
  double stddev = 0.0;                  // sample std over successful trials
  double wall_seconds = 0.0;            // in-memory only, never serialized
};

struct BenchReport {
  std::string kind;
  std::map<std::string, std::string> config;
  std::vector<BenchCell> cells;
  double wall_seconds = 0.0;            // in-memory only, never serialized

  const BenchCell* find(const std::string& method, double noise,
                        const std::string& key = "") const;
};

struct MedeBenchConfig {
  std::vector<Method> methods = all_methods();
  std::vector<double> noise_levels{0.0, 0.1, 0.3, 0.5, 0.8};
  int seeds = 50;
  int dim = 3;
  sim::AccelMode accel_mode = sim::AccelMode::differentiated;
  sim::SimConfig sim;                        // dim and noise overridden per cell
  inference::OptimizerConfig optimizer;
  double score_epsilon = 1e-6;
  std::uint64_t base_seed = 0;
  int jobs = 1;                              // 0 = hardware concurrency
};

/// One (simulate -> infer -> distance error) trial per (method, noise,
/// seed). Episodes are shared across methods for a given (noise, seed) so
/// the comparison is paired; per-trial failures are recorded and excluded
/// from the mean.
BenchReport run_mede_benchmark(const MedeBenchConfig& cfg);

struct PartialBenchConfig {
  std::vector<double> noise_levels{0.0, 0.1, 0.3, 0.5, 0.8};
  std::vector<int> prefix_lens{3, 5, 10, 20, 30, 50, 75, 100};
  int seeds = 50;
  int dim = 3;
  sim::AccelMode accel_mode = sim::AccelMode::differentiated;
  sim::SimConfig sim;
  inference::OptimizerConfig optimizer;
  double score_epsilon = 1e-6;
  std::uint64_t base_seed = 0;
  int jobs = 1;
};

/// Error-vs-prefix curves via infer_partial. The inference stream does not
/// depend on the prefix, so the prefix == steps cells coincide with the
/// full-trajectory benchmark under the same base seed.
BenchReport run_partial_benchmark(const PartialBenchConfig& cfg);

struct SequentialBenchConfig {
  std::vector<double> noise_levels{0.0, 0.1, 0.3};
  std::vector<double> switch_ratios{0.3, 0.5, 0.7};
  int seeds = 50;
  int dim = 3;
  sim::AccelMode accel_mode = sim::AccelMode::differentiated;
  sim::SimConfig sim;
  inference::OptimizerConfig optimizer;
  double score_epsilon = 1e-6;
  std::uint64_t base_seed = 0;
  int jobs = 1;
};

/// Two-point episodes at each switch ratio; reports per-point and overall
/// distance errors as dcs_p1 / dcs_p2 / dcs_overall rows.
BenchReport run_sequential_benchmark(const SequentialBenchConfig& cfg);

struct LandscapeResult {
  Eigen::VectorXd xs;
  Eigen::VectorXd ys;
  Eigen::MatrixXd scores;  // ys.size() rows by xs.size() cols
};

/// Evaluates the score on a regular grid. 3D trajectories require a
/// z-slice value for the candidate's third component.
LandscapeResult score_landscape(const Trajectory& traj, const scoring::ScoreFunction& score,
                                const Eigen::Vector2d& grid_min, const Eigen::Vector2d& grid_max,
                                const Eigen::Vector2i& resolution,
                                std::optional<double> z_slice = std::nullopt);

void write_landscape_csv(const std::filesystem::path& path, const LandscapeResult& result);

/// Report JSON / flat CSV, values formatted to 6 significant digits for
/// byte-stable output. Wall-clock timings stay out of both formats.
void write_report_json(const std::filesystem::path& path, const BenchReport& report);
void write_report_csv(const std::filesystem::path& path, const BenchReport& report);

}  // namespace tref6::bench
