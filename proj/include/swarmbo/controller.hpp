// Phase-coupled Hebbian swarm controller.
//
// Each agent carries a phase oscillator and three low-pass filtered inputs
// (swarming, reward, sensory cue). Agent-agent weights W and agent-reward
// weights W_r are learned online; a weight w encodes the preferred distance
// D' = -scale * ln(w). Each step moves every agent by
//
//   dx_i = 1 / (2 sum_j V_ij) * sum_j V_ij (D'_ij - D_ij) u_ji
//
// where V is mutual visibility, D the actual distance and u_ji the unit
// vector from j to i, so agents closer than preferred move apart and agents
// farther than preferred move together. Rewards contribute a term of the same
// form with scale kappa.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "swarmbo/env.hpp"
#include "swarmbo/params.hpp"

namespace swarmbo {

struct SwarmConstants {
  std::size_t n_agents = 300;
  double dt = 0.01;         // s
  double duration = 200.0;  // s
  double e_max = 3000.0;    // kg points^2 / s^2
  double mu_m = 0.9;        // momentum coefficient, also the agent mass
  double g_s = 0.5;
  double g_r = 0.3;
  double g_c = 0.2;
  double d_rad = 12.0;      // capture radius (points)
  double w_floor = 1e-6;

  void validate() const;
  /// Number of integration steps covering `seconds`.
  long steps_for(double seconds) const;
  /// Speed at which kinetic energy equals e_max.
  double max_speed() const;
  /// Smallest representable weight strictly above w_floor.
  double weight_min() const;
  /// ceil(n_agents / n_rewards).
  std::size_t capture_threshold(std::size_t n_rewards) const;

  friend bool operator==(const SwarmConstants &, const SwarmConstants &) =
      default;
};

struct AgentState {
  Point pos;
  Point vel;
  double phase = 0.0;  // [0, 2pi)
  double q = 0.0;      // filtered swarming input
  double r = 0.0;      // filtered reward input
  double c = 0.0;      // filtered cue input
};

struct SwarmState {
  std::vector<AgentState> agents;
  Eigen::MatrixXd W;   // n_agents x n_agents, symmetric
  Eigen::MatrixXd Wr;  // n_agents x n_rewards
  std::vector<std::optional<long>> capture_step;  // per reward
  long t = 0;

  std::size_t num_captured() const;
  bool all_captured() const;
  std::vector<Point> positions() const;

  friend bool operator==(const SwarmState &a, const SwarmState &b);
};

struct CaptureEvent {
  std::size_t reward_id = 0;
  long step = 0;
  std::size_t n_agents_in_radius = 0;
  std::vector<std::size_t> agents;  // ids within d_rad at capture

  friend bool operator==(const CaptureEvent &, const CaptureEvent &) = default;
};

struct TrajectoryFrame {
  long step = 0;
  std::vector<Point> positions;
  friend bool operator==(const TrajectoryFrame &, const TrajectoryFrame &) =
      default;
};

struct EpisodeResult {
  std::vector<std::optional<long>> capture_steps;  // per reward
  std::vector<CaptureEvent> events;                // in capture order
  std::vector<int> n_cap_trace;                    // after each step
  std::vector<TrajectoryFrame> trajectory;         // empty unless requested
  long completion_step = 0;  // first step with all captured, else n_steps
  long n_steps = 0;          // N_t for this episode
  double dt = 0.0;

  std::size_t num_captured() const;
  friend bool operator==(const EpisodeResult &, const EpisodeResult &) =
      default;
};

struct EpisodeOptions {
  bool record_trajectory = false;
  long trajectory_every = 10;
};

double preferred_distance(double w, double scale);

SwarmState init_swarm(const MazeSpec &maze, const ParamVector &params,
                      const SwarmConstants &consts, std::uint64_t seed);

/// Agent-reward visibility (n_agents x n_rewards).
VisibilityMatrix reward_visibility(const MazeSpec &maze,
                                   const SwarmState &state);

std::vector<Point> swarm_increment(const SwarmState &state,
                                   const VisibilityMatrix &vis,
                                   const ParamVector &params,
                                   const SwarmConstants &consts);

std::vector<Point> reward_increment(const SwarmState &state,
                                    const MazeSpec &maze,
                                    const VisibilityMatrix &reward_vis,
                                    const ParamVector &params,
                                    const SwarmConstants &consts);
std::vector<Point> reward_increment(const SwarmState &state,
                                    const MazeSpec &maze,
                                    const ParamVector &params,
                                    const SwarmConstants &consts);

/// Advances one integration step in place. Newly captured rewards are
/// appended to `events` when given.
void advance(SwarmState &state, const MazeSpec &maze,
             const ParamVector &params, const SwarmConstants &consts,
             std::vector<CaptureEvent> *events = nullptr);

SwarmState step(SwarmState state, const MazeSpec &maze,
                const ParamVector &params, const SwarmConstants &consts);

EpisodeResult run_episode(const MazeSpec &maze, const ParamVector &params,
                          const SwarmConstants &consts, std::uint64_t seed,
                          double cutoff_s, const EpisodeOptions &opts = {});

}  // namespace swarmbo
