#include "swarmbo/objective.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

#include "swarmbo/seeding.hpp"

namespace swarmbo {

ObjectiveScore loss_from_counts(long t_final, long n_t, std::size_t n_cap) {
  if (n_t <= 0)
    throw std::invalid_argument("n_t must be positive");
  if (t_final < 0 || t_final > n_t)
    throw std::invalid_argument("t_final outside [0, n_t]");
  // The denominator n_t * (N_cap + 1) keeps the loss inside [-1, 0].
  const double denom =
      static_cast<double>(n_t) * (static_cast<double>(n_cap) + 1.0);
  return {-static_cast<double>(t_final) / denom};
}

ObjectiveScore episode_loss(const EpisodeResult &result, long n_t,
                            std::size_t n_r) {
  if (result.completion_step > n_t)
    throw std::invalid_argument("completion_step exceeds n_t");
  const std::size_t n_cap = result.num_captured();
  const long t_final = n_cap == n_r ? result.completion_step : n_t;
  return loss_from_counts(t_final, n_t, n_cap);
}

ObjectiveScore combined_score(ObjectiveScore l_hairpin, ObjectiveScore l_tunnel) {
  return {0.5 * (l_hairpin.value + l_tunnel.value)};
}

std::pair<std::uint64_t, std::uint64_t> maze_seeds(std::uint64_t seed) {
  return {derive_seed(seed, {0}), derive_seed(seed, {1})};
}

Evaluation evaluate_params(const ParamVector &params,
                           const SwarmConstants &consts,
                           const std::pair<MazeSpec, MazeSpec> &mazes,
                           std::uint64_t seed, double cutoff_s,
                           bool parallel) {
  params.validate();
  const auto [seed_h, seed_t] = maze_seeds(seed);
  auto score = [&](const MazeSpec &maze, std::uint64_t s) {
    const auto r = run_episode(maze, params, consts, s, cutoff_s);
    return episode_loss(r, r.n_steps, maze.num_rewards());
  };

  Evaluation e;
  if (parallel) {
    auto fut = std::async(std::launch::async, score, std::cref(mazes.second),
                          seed_t);
    e.hairpin = score(mazes.first, seed_h);
    e.tunnel = fut.get();
  } else {
    e.hairpin = score(mazes.first, seed_h);
    e.tunnel = score(mazes.second, seed_t);
  }
  e.combined = combined_score(e.hairpin, e.tunnel);
  return e;
}

}  // namespace swarmbo
