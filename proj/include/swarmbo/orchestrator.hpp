// The optimization loop: initial design, then fit / acquire / evaluate /
// append for each epoch, with the record flushed as it grows.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "swarmbo/config.hpp"
#include "swarmbo/env.hpp"
#include "swarmbo/record.hpp"

namespace swarmbo {

struct TrialOutcome {
  double loss_hairpin = 0.0;
  double loss_tunnel = 0.0;
  double y = 0.0;
};

/// Objective evaluated once per trial with that trial's seed. Must be safe
/// to call concurrently.
using BlackBox =
    std::function<TrialOutcome(const ParamVector &params, std::uint64_t seed)>;

/// hairpin.json and tunnel.json from `dir`, or the builtin pair when empty.
std::pair<MazeSpec, MazeSpec> load_mazes(const std::string &dir);

BlackBox swarm_black_box(const SwarmConstants &consts,
                         std::pair<MazeSpec, MazeSpec> mazes, double cutoff_s,
                         bool parallel);

struct RunOptions {
  std::string record_path;  // empty: keep the record in memory only
  bool resume = true;       // continue an existing record at record_path
  bool parallel = true;     // evaluate a batch concurrently
  std::function<void(const std::string &)> log;
};

std::uint64_t trial_seed(std::uint64_t master, std::size_t index);
std::vector<ParamVector> initial_design(const RunConfig &cfg);

RunRecord run_bo(const RunConfig &cfg, const BlackBox &objective,
                 const RunOptions &opts = {});
/// Swarm objective on the configured mazes, record at out_dir/record.jsonl.
RunRecord run_bo(const RunConfig &cfg, const RunOptions &opts);

/// Running maximum of y over trials.
std::vector<double> best_observed_trace(const RunRecord &record);

/// GP fitted to every trial in the record (deterministic in the record).
GPModel fit_record(const RunRecord &record);

}  // namespace swarmbo
