// Time-optimal cooperative capture loss and the two-maze score.
#pragma once

#include <cstdint>
#include <utility>

#include "swarmbo/controller.hpp"

namespace swarmbo {

/// Loss in [-1, 0]; 0 is best.
struct ObjectiveScore {
  double value = -1.0;
  friend bool operator==(ObjectiveScore, ObjectiveScore) = default;
};

/// L = -t / (n_t * (N_cap + 1)), with t the completion step (n_t on
/// timeout) and N_cap the number of captured rewards at t.
ObjectiveScore loss_from_counts(long t_final, long n_t, std::size_t n_cap);

ObjectiveScore episode_loss(const EpisodeResult &result, long n_t,
                            std::size_t n_r);

ObjectiveScore combined_score(ObjectiveScore l_hairpin, ObjectiveScore l_tunnel);

struct Evaluation {
  ObjectiveScore hairpin;
  ObjectiveScore tunnel;
  ObjectiveScore combined;
};

/// Per-maze episode seeds used by evaluate_params.
std::pair<std::uint64_t, std::uint64_t> maze_seeds(std::uint64_t seed);

/// Runs one episode per maze (concurrently when `parallel`) and averages the
/// two losses.
Evaluation evaluate_params(const ParamVector &params,
                           const SwarmConstants &consts,
                           const std::pair<MazeSpec, MazeSpec> &mazes,
                           std::uint64_t seed, double cutoff_s,
                           bool parallel = false);

}  // namespace swarmbo
