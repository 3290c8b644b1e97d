// Analysis exports: samples/metrics tables, episode replays and the
// anticipated parameter space.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarmbo/acquisition.hpp"
#include "swarmbo/controller.hpp"
#include "swarmbo/record.hpp"

namespace swarmbo {

inline constexpr int kHistogramBins = 20;

struct ReplayOutput {
  EpisodeResult result;
  ParamVector params;                 // after clamping
  std::vector<std::string> clamped;   // names of clamped parameters
  std::string trajectory_path;
  std::string captures_path;
  std::string capture_agents_path;
};

/// Full-duration episode with trajectory logging. Out-of-range parameters are
/// clamped into bounds and reported in `clamped`. Files are named
/// <prefix>_trajectory.csv, <prefix>_captures.csv and
/// <prefix>_capture_agents.csv; prefix defaults to the maze name.
ReplayOutput replay(const ParamVector &params, const MazeSpec &maze,
                    const SwarmConstants &consts, std::uint64_t seed,
                    const std::string &out_dir, const std::string &prefix = "");

/// Reference parameter set used for default-vs-tuned comparisons (kappa
/// above its bound; replay clamps it).
ParamVector default_params();

ParamVector load_params(const std::string &path);
void save_params(const ParamVector &p, const std::string &path);

struct AnticipatedRow {
  ParamVector params;
  double posterior_mean = 0.0;  // objective units
  double posterior_var = 0.0;   // latent, objective units
};

/// n_samples points from repeated acquisition optimization (distinct seeds
/// derived from cfg.seed), scored under the posterior. Random kind is
/// replaced by qEI. Throws GPError if the model is unfitted.
std::vector<AnticipatedRow> anticipate(const GPModel &model, const Dataset &data,
                                       AcqConfig cfg, std::size_t n_samples);
void write_anticipated(const std::vector<AnticipatedRow> &rows,
                       const std::string &path);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};
/// kHistogramBins equal bins over [-1, 0]; values outside are clamped in.
std::vector<HistogramBin> objective_histogram(const std::vector<double> &ys);

struct ExportOptions {
  bool replay_incumbent = true;
};

/// Writes samples.csv, metrics.csv, histogram.csv, best_observed.csv,
/// run_info.json, the two maze files and incumbent replays for both mazes.
/// Output is a deterministic function of (record, model).
void export_viz(const RunRecord &record, const GPModel &model,
                const std::string &out_dir, const ExportOptions &opts = {});

}  // namespace swarmbo
